//! The closed refrigerant loop: two coils, compressor, reversing valve,
//! expansion valve, accumulator, and the discharge line tying them together.
//!
//! One call to [`PlantModel::evaluate`] produces every state derivative and
//! the diagnostic quantities of interest at a single instant. The loop is
//! wired so that every connection books the identical enthalpy flux at both
//! of its ends — conservation of refrigerant mass and energy then holds
//! exactly in the assembled ODEs, independent of property-table accuracy,
//! and any drift observed in a simulation is attributable to the integrator
//! alone.
//!
//! Flow orientation is fixed by the heating mode: compressor → discharge
//! line → reversing valve → indoor coil head; indoor tail → expansion valve
//! → outdoor head; outdoor tail → reversing valve → accumulator →
//! compressor. Defrost does not re-wire anything: the valve travel `sigma`
//! re-routes the discharge to the outdoor tail, the coil chains and the
//! expansion valve simply run backwards, and every flow law is odd in its
//! driving pressure difference, so one set of equations covers both modes
//! and the swing between them.

use crate::components::{
    accumulator_outlet, compressor_flow, exv_flow, fan_operating_point, reversing_valve_flows,
    superheat_pi, AccumulatorParams, CompressorParams, ExvCommand, ExvParams, FanOperatingPoint,
    FanParams, ReversingValveFlows, ReversingValveParams, SuperheatPiParams, SystemCurve,
    ValveEndpoints,
};
use crate::film::{bare_film_at, FilmParams};
use crate::hx::{
    air_pressure_drop, port_flux, state_transform, HxDerivatives, HxGeometry, HxModel, HxPorts,
    MoistAirStream, RefrigerantCv,
};
use crate::properties::{self, RefrigerantTable, WaterConstants};
use crate::system::state::{StateLayout, SystemState};
use crate::{Error, Result};

/// Actuator settings at one instant, produced by the scenario schedule.
#[derive(Debug, Clone, Copy)]
pub struct ControlInputs {
    /// Compressor shaft speed [rev/s].
    pub comp_speed: f64,
    /// Outdoor fan speed [rev/s].
    pub fan_speed: f64,
    /// Expansion-valve command (closed-loop or scheduled).
    pub exv: ExvCommand,
    /// Reversing-valve travel: 0 = heating, 1 = defrost.
    pub sigma: f64,
}

/// The complete plant: component models, air boundary conditions, and the
/// refrigerant charge the initializer must place.
#[derive(Debug, Clone)]
pub struct PlantModel {
    /// Outdoor (frosting) coil; must carry film volumes.
    pub outdoor: HxModel,
    /// Indoor coil; must be dry.
    pub indoor: HxModel,
    pub compressor: CompressorParams,
    pub exv: ExvParams,
    pub rv: ReversingValveParams,
    pub accumulator: AccumulatorParams,
    pub outdoor_fan: FanParams,
    pub pi: SuperheatPiParams,
    /// Discharge-line volume between compressor and reversing valve [m³].
    /// Small but not zero: it turns the valve split into plain CV dynamics
    /// instead of an algebraic constraint.
    pub line_volume: f64,
    /// Outdoor air condition; `m_dot_dry` is ignored (the fan sets it).
    pub ambient: MoistAirStream,
    /// Indoor return air, with its constant dry mass flow.
    pub indoor_air: MoistAirStream,
    /// Total refrigerant charge [kg].
    pub charge: f64,
    /// Upwind blend width for the interconnect flows [kg/s].
    pub m_dot_eps: f64,
    pub table: RefrigerantTable,
    pub water: WaterConstants,
}

/// Everything [`PlantModel::evaluate`] can say about one instant.
#[derive(Debug, Clone)]
pub struct PlantDiagnostics {
    /// Reversing-valve travel in effect.
    pub sigma: f64,
    /// Superheat at the active evaporator outlet [K] (the controller's
    /// process variable; negative readings mean a wet outlet).
    pub superheat: f64,
    /// Expansion-valve opening in effect [0..1].
    pub exv_opening: f64,
    /// Compressor mass flow [kg/s].
    pub m_dot_compressor: f64,
    /// Compressor discharge enthalpy [J/kg].
    pub h_discharge: f64,
    /// Accumulator pickup enthalpy feeding the compressor [J/kg].
    pub h_suction: f64,
    /// Compressor shaft power [W].
    pub compressor_power: f64,
    /// Expansion-valve flow, positive indoor → outdoor [kg/s].
    pub m_dot_exv: f64,
    /// Outdoor fan operating point.
    pub fan: FanOperatingPoint,
    /// True when frost has squeezed the free flow area to its floor.
    pub air_blocked: bool,
    /// Outdoor coil air inlet actually applied (ambient + fan flow).
    pub outdoor_air: MoistAirStream,
    /// Accumulator liquid level [0..1].
    pub acc_level: f64,
    /// Refrigerant mass in the accumulator [kg].
    pub charge_accumulator: f64,
    /// Refrigerant mass in the discharge line [kg].
    pub charge_line: f64,
    /// Total refrigerant mass over all volumes [kg].
    pub charge_total: f64,
    /// Reversing-valve path flows [kg/s].
    pub rv: ReversingValveFlows,
    /// Full outdoor-coil evaluation (per-CV film diagnostics included).
    pub outdoor: HxDerivatives,
    /// Full indoor-coil evaluation.
    pub indoor: HxDerivatives,
}

/// One derivative evaluation: the packed dy/dt plus diagnostics.
#[derive(Debug, Clone)]
pub struct PlantEval {
    /// Layout-packed state derivative.
    pub dy: Vec<f64>,
    pub diag: PlantDiagnostics,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

impl PlantModel {
    /// The state layout implied by the coil discretizations.
    pub fn layout(&self) -> StateLayout {
        StateLayout {
            n_outdoor: self.outdoor.geom.n_cv(),
            n_indoor: self.indoor.geom.n_cv(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.outdoor.validate()?;
        self.indoor.validate()?;
        if self.outdoor.film.is_none() {
            return Err(Error::config(
                "plant.outdoor.film",
                "the outdoor coil must carry film volumes",
            ));
        }
        if self.indoor.film.is_some() {
            return Err(Error::config(
                "plant.indoor.film",
                "film volumes on the indoor coil are not supported",
            ));
        }
        if self.outdoor.name == self.indoor.name {
            return Err(Error::config(
                "plant.indoor.name",
                "coil names must differ for error reporting and output channels",
            ));
        }
        for (key, v) in [
            ("plant.line_volume", self.line_volume),
            ("plant.charge", self.charge),
            ("plant.m_dot_eps", self.m_dot_eps),
            ("plant.accumulator.volume", self.accumulator.volume),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        if !(self.indoor_air.m_dot_dry >= 0.0) {
            return Err(Error::config(
                "plant.indoor_air.m_dot_dry",
                "must be non-negative",
            ));
        }
        Ok(())
    }

    /// A coherent mid-size unit (≈2 kW heating at −2 °C ambient before
    /// frosting sets in) used by tests and as the config baseline.
    pub fn reference_unit() -> Self {
        let geom = HxGeometry {
            area_air: 1.2,
            ..HxGeometry::default()
        };
        let film = FilmParams {
            a_s: geom.area_air,
            ..FilmParams::default()
        };
        let sat = |t: f64| {
            properties::humidity_ratio_sat(t, 101_325.0)
                .expect("reference conditions sit inside the psychrometric range")
        };
        PlantModel {
            outdoor: HxModel {
                name: "outdoor".into(),
                geom: geom.clone(),
                r_htc: Default::default(),
                a_htc: Default::default(),
                film: Some(film),
            },
            indoor: HxModel {
                name: "indoor".into(),
                geom,
                r_htc: Default::default(),
                a_htc: Default::default(),
                film: None,
            },
            compressor: Default::default(),
            exv: Default::default(),
            rv: Default::default(),
            accumulator: Default::default(),
            outdoor_fan: Default::default(),
            pi: Default::default(),
            line_volume: 3.0e-4,
            ambient: MoistAirStream {
                t: 275.15,
                p: 101_325.0,
                omega: 0.75 * sat(275.15),
                m_dot_dry: 0.0,
            },
            indoor_air: MoistAirStream {
                t: 293.15,
                p: 101_325.0,
                omega: 0.5 * sat(293.15),
                m_dot_dry: 0.25,
            },
            charge: 0.5,
            m_dot_eps: 1.0e-3,
            table: RefrigerantTable::builtin(),
            water: WaterConstants::default(),
        }
    }

    /// Equalized off-cycle state: one pressure everywhere, pinned by the
    /// outdoor coil sitting at ambient saturation; the indoor coil and its
    /// walls hold superheated vapor at room temperature; whatever charge the
    /// coils and line do not hold is parked in the accumulator. Films start
    /// bare and dry at the wall temperature.
    pub fn initial_state(&self) -> Result<SystemState> {
        let table = &self.table;
        let c = &self.water;
        let t_amb = self.ambient.t;
        let t_ind = self.indoor_air.t;
        let p_eq = table.saturation_pressure(t_amb)?;
        let sat = table.saturation(p_eq)?;

        // outdoor coil: both phases present at ambient temperature; the
        // split is immaterial for the scenario (flow rebalances in seconds)
        let h_outdoor = 0.5 * (sat.h_liq + sat.h_vap);
        // indoor coil: no liquid survives in the warm space
        let h_indoor = table.vapor_enthalpy_at(p_eq, t_ind)?;
        // the discharge line lives with the outdoor unit
        let h_line = h_outdoor;

        let n_o = self.outdoor.geom.n_cv();
        let n_i = self.indoor.geom.n_cv();
        let m_outdoor =
            table.props(p_eq, h_outdoor)?.rho * self.outdoor.geom.cv_volume * n_o as f64;
        let m_indoor = table.props(p_eq, h_indoor)?.rho * self.indoor.geom.cv_volume * n_i as f64;
        let m_line = table.props(p_eq, h_line)?.rho * self.line_volume;
        let m_acc = self.charge - m_outdoor - m_indoor - m_line;
        let rho_acc = m_acc / self.accumulator.volume;
        if !(rho_acc > sat.rho_vap && rho_acc < sat.rho_liq) {
            return Err(Error::config(
                "plant.charge",
                format!(
                    "{} kg leaves {m_acc:.3} kg for the accumulator, outside its two-phase \
                     window [{:.3}, {:.3}] kg at the equalized pressure",
                    self.charge,
                    sat.rho_vap * self.accumulator.volume,
                    sat.rho_liq * self.accumulator.volume
                ),
            ));
        }
        // invert the table's own two-phase density (monotone decreasing in h)
        let h_acc = {
            let (mut lo, mut hi) = (sat.h_liq, sat.h_vap);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if table.props(p_eq, mid)?.rho > rho_acc {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };

        let film = self
            .outdoor
            .film
            .as_ref()
            .expect("validated: outdoor coil carries films");

        Ok(SystemState {
            outdoor_p: vec![p_eq; n_o],
            outdoor_h: vec![h_outdoor; n_o],
            outdoor_t_wall: vec![t_amb; n_o],
            outdoor_film: vec![bare_film_at(t_amb, film, c); n_o],
            indoor_p: vec![p_eq; n_i],
            indoor_h: vec![h_indoor; n_i],
            indoor_t_wall: vec![t_ind; n_i],
            discharge: RefrigerantCv { p: p_eq, h: h_line },
            accumulator: RefrigerantCv { p: p_eq, h: h_acc },
            exv_integral: 0.0,
        })
    }

    /// Evaluate every state derivative and the plant diagnostics at one
    /// instant. `t_fs_cache` warm-starts the film surface solves (one slot
    /// per outdoor CV, `NaN` for a cold start).
    pub fn evaluate(
        &self,
        inputs: &ControlInputs,
        s: &SystemState,
        t_fs_cache: &mut [f64],
    ) -> Result<PlantEval> {
        let table = &self.table;
        let lay = self.layout();
        let (n_o, n_i) = (lay.n_outdoor, lay.n_indoor);
        let eps = self.m_dot_eps;

        // --- suction side: accumulator pickup and superheat control.
        // The superheat sensor sits at the evaporator outlet — outdoor tail
        // in heating, indoor head under reversed flow — not at the
        // accumulator, whose liquid pool would pin the reading to zero and
        // starve the loop of feedback. The valve travel blends the two
        // locations so the measurement stays continuous through a mode swing.
        let (p_acc, h_acc) = (s.accumulator.p, s.accumulator.h);
        let acc_out = accumulator_outlet(p_acc, h_acc, &self.accumulator, table)
            .map_err(|e| e.in_model("accumulator"))?;
        let sh_at = |p: f64, h: f64| -> Result<f64> {
            Ok(table.props(p, h)?.t - table.saturation(p)?.t_sat)
        };
        let superheat = (1.0 - inputs.sigma)
            * sh_at(s.outdoor_p[n_o - 1], s.outdoor_h[n_o - 1])?
            + inputs.sigma * sh_at(s.indoor_p[0], s.indoor_h[0])?;
        let pi = superheat_pi(superheat, s.exv_integral, inputs.exv, &self.pi);

        // --- compressor
        let comp = compressor_flow(
            p_acc,
            acc_out.h_out,
            s.discharge.p,
            inputs.comp_speed,
            &self.compressor,
            table,
        )
        .map_err(|e| e.in_model("compressor"))?;

        // --- reversing valve: conductance split between the four endpoints
        let rho_dis = table
            .props(s.discharge.p, s.discharge.h)
            .map_err(|e| e.in_model("discharge line"))?
            .rho;
        let rho_acc = table.props(p_acc, h_acc)?.rho;
        let rho_ind_head = table.props(s.indoor_p[0], s.indoor_h[0])?.rho;
        let rho_out_tail = table
            .props(s.outdoor_p[n_o - 1], s.outdoor_h[n_o - 1])?
            .rho;
        let rv = reversing_valve_flows(
            inputs.sigma,
            &ValveEndpoints {
                p_dis: s.discharge.p,
                rho_dis,
                p_indoor: s.indoor_p[0],
                rho_indoor: rho_ind_head,
                p_outdoor: s.outdoor_p[n_o - 1],
                rho_outdoor: rho_out_tail,
                p_suc: p_acc,
                rho_suc: rho_acc,
            },
            &self.rv,
        );
        // each valve path books one flux, shared verbatim by both endpoints
        let phi_d2i = port_flux(rv.dis_to_indoor, s.discharge.h, s.indoor_h[0], eps);
        let phi_d2o = port_flux(rv.dis_to_outdoor, s.discharge.h, s.outdoor_h[n_o - 1], eps);
        let phi_i2s = port_flux(rv.indoor_to_suc, s.indoor_h[0], h_acc, eps);
        let phi_o2s = port_flux(rv.outdoor_to_suc, s.outdoor_h[n_o - 1], h_acc, eps);

        // --- expansion valve between indoor tail and outdoor head,
        // isenthalpic: one flux serves both coil ports
        let rho_ind_tail = table
            .props(s.indoor_p[n_i - 1], s.indoor_h[n_i - 1])?
            .rho;
        let rho_out_head = table.props(s.outdoor_p[0], s.outdoor_h[0])?.rho;
        let dp_exv = s.indoor_p[n_i - 1] - s.outdoor_p[0];
        let m_exv = exv_flow(pi.opening, dp_exv, rho_ind_tail, rho_out_head, &self.exv);
        let phi_exv = port_flux(m_exv, s.indoor_h[n_i - 1], s.outdoor_h[0], eps);

        // --- outdoor air: fan against the frost-narrowed coil
        let rho_amb = self.ambient.density();
        let delta_mean = mean(
            &s.outdoor_film
                .iter()
                .map(|f| f.delta_f)
                .collect::<Vec<_>>(),
        );
        let (coil_dp_unit, _) = air_pressure_drop(1.0, delta_mean, rho_amb, &self.outdoor.geom);
        let fan = fan_operating_point(
            inputs.fan_speed,
            &SystemCurve {
                coeff: coil_dp_unit,
                static_head: 0.0,
            },
            &self.outdoor_fan,
        );
        let (_, air_blocked) = air_pressure_drop(fan.v_dot, delta_mean, rho_amb, &self.outdoor.geom);
        let outdoor_air = MoistAirStream {
            m_dot_dry: fan.v_dot * rho_amb / (1.0 + self.ambient.omega),
            ..self.ambient
        };

        // --- coils
        let out_ports = HxPorts {
            m_dot_head: m_exv,
            phi_head: phi_exv,
            m_dot_tail: rv.outdoor_to_suc - rv.dis_to_outdoor,
            phi_tail: phi_o2s - phi_d2o,
        };
        let d_out = self.outdoor.assemble(
            &s.outdoor_p,
            &s.outdoor_h,
            &s.outdoor_t_wall,
            &s.outdoor_film,
            &out_ports,
            &outdoor_air,
            table,
            &self.water,
            t_fs_cache,
        )?;
        let ind_ports = HxPorts {
            m_dot_head: rv.dis_to_indoor - rv.indoor_to_suc,
            phi_head: phi_d2i - phi_i2s,
            m_dot_tail: m_exv,
            phi_tail: phi_exv,
        };
        let d_ind = self.indoor.assemble(
            &s.indoor_p,
            &s.indoor_h,
            &s.indoor_t_wall,
            &[],
            &ind_ports,
            &self.indoor_air,
            table,
            &self.water,
            &mut [],
        )?;

        // --- discharge line CV
        let a_dis = comp.m_dot - rv.dis_to_indoor - rv.dis_to_outdoor;
        let b_dis = comp.m_dot * comp.h_dis - phi_d2i - phi_d2o;
        let (dp_dis, dh_dis) = state_transform(s.discharge, self.line_volume, a_dis, b_dis, table)
            .map_err(|e| e.in_model("discharge line"))?;

        // --- accumulator CV (compressor draw carries the pickup enthalpy)
        let a_acc = rv.indoor_to_suc + rv.outdoor_to_suc - comp.m_dot;
        let b_acc = phi_i2s + phi_o2s - comp.m_dot * acc_out.h_out;
        let (dp_acc, dh_acc) = state_transform(
            s.accumulator,
            self.accumulator.volume,
            a_acc,
            b_acc,
            table,
        )
        .map_err(|e| e.in_model("accumulator"))?;

        // --- pack
        let mut dy = vec![0.0; lay.dim()];
        dy[lay.outdoor_p()].copy_from_slice(&d_out.dp);
        dy[lay.outdoor_h()].copy_from_slice(&d_out.dh);
        dy[lay.outdoor_t_wall()].copy_from_slice(&d_out.dt_wall);
        for (i, f) in d_out.film.iter().enumerate() {
            dy[lay.outdoor_h_film().start + i] = f.d_h_film;
            dy[lay.outdoor_delta_f().start + i] = f.d_delta_f;
            dy[lay.outdoor_rho_f().start + i] = f.d_rho_f;
            dy[lay.outdoor_m_wi().start + i] = f.d_m_wi;
        }
        dy[lay.indoor_p()].copy_from_slice(&d_ind.dp);
        dy[lay.indoor_h()].copy_from_slice(&d_ind.dh);
        dy[lay.indoor_t_wall()].copy_from_slice(&d_ind.dt_wall);
        dy[lay.discharge_p()] = dp_dis;
        dy[lay.discharge_h()] = dh_dis;
        dy[lay.accumulator_p()] = dp_acc;
        dy[lay.accumulator_h()] = dh_acc;
        dy[lay.exv_integral()] = pi.di_dt;

        let charge_line = rho_dis * self.line_volume;
        let charge_accumulator = rho_acc * self.accumulator.volume;
        let diag = PlantDiagnostics {
            sigma: inputs.sigma,
            superheat,
            exv_opening: pi.opening,
            m_dot_compressor: comp.m_dot,
            h_discharge: comp.h_dis,
            h_suction: acc_out.h_out,
            compressor_power: comp.p_shaft,
            m_dot_exv: m_exv,
            fan,
            air_blocked,
            outdoor_air,
            acc_level: acc_out.level,
            charge_accumulator,
            charge_line,
            charge_total: d_out.charge + d_ind.charge + charge_line + charge_accumulator,
            rv,
            outdoor: d_out,
            indoor: d_ind,
        };
        Ok(PlantEval { dy, diag })
    }
}

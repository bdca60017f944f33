//! CSV and JSON writers. Floats are printed with 17 significant digits so
//! every value reads back to the same double.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::analysis::DampingCurve;
use crate::error::Result;
use crate::fronttracker::{EventRecord, Snapshot, TraceRow, Trajectory};
use crate::functionals::{Provenance, WaveSummary};
use crate::riemann::{RiemannFan, WaveSpeed};

pub const SNAPSHOT_HEADER: &str = "t,x_cell_left,v,u,lambda";
pub const EVENT_HEADER: &str = "t,x,kind,incoming,outgoing,delta_L_xi,delta_Q,delta_F,solver";
pub const FUNCTIONAL_HEADER: &str = "event_index,t,L,L_cd,L_np,Q,L_xi,F,max_live_order";
pub const DAMPING_HEADER: &str = "m,d,c,k";
pub const FAN_HEADER: &str = "family,strength,speed_tail,speed_head,v_left,u_left,lambda_left,v_right,u_right,lambda_right";

/// `x` in scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

/// Waves as `family:strength:order` joined by `;`, with family one of `1`, `2`, `3`, `np`.
pub fn encode_waves(waves: &[WaveSummary]) -> String {
    waves.iter().map(|w| format!("{}:{}:{}", w.kind.label(), num(w.strength), w.order)).collect::<Vec<_>>().join(";")
}

/// One row per constant cell; the leftmost cell starts at `-inf`.
pub fn write_snapshots<W: Write>(mut w: W, snapshots: &[Snapshot]) -> io::Result<()> {
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for s in snapshots {
        let cells = std::iter::once((f64::NEG_INFINITY, s.left)).chain(s.cells.iter().copied());
        for (x, st) in cells {
            writeln!(w, "{},{},{},{},{}", num(s.t), num(x), num(st.v), num(st.u), num(st.lam))?;
        }
    }
    Ok(())
}

pub fn write_events<W: Write>(mut w: W, events: &[EventRecord]) -> io::Result<()> {
    writeln!(w, "{EVENT_HEADER}")?;
    for e in events {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            num(e.t),
            num(e.x),
            e.kind_label(),
            encode_waves(&e.incoming),
            encode_waves(&e.outgoing),
            num(e.delta_l_xi),
            num(e.delta_q),
            num(e.delta_f),
            e.solver.label()
        )?;
    }
    Ok(())
}

/// Functional trace with the suffix sums `tilde_F_1 .. tilde_F_{k_max}`.
pub fn write_functionals<W: Write>(mut w: W, trace: &[TraceRow], k_max: usize) -> io::Result<()> {
    write!(w, "{FUNCTIONAL_HEADER}")?;
    for k in 1..=k_max {
        write!(w, ",tilde_F_{k}")?;
    }
    writeln!(w)?;
    for r in trace {
        let f = &r.functionals;
        write!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.event_index,
            num(r.t),
            num(f.l),
            num(f.l_cd),
            num(f.l_np),
            num(f.q),
            num(f.l_xi),
            num(f.f),
            f.max_live_order()
        )?;
        for k in 1..=k_max {
            write!(w, ",{}", num(f.tilde_f_of(k)))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_damping<W: Write>(mut w: W, curve: &DampingCurve) -> io::Result<()> {
    writeln!(w, "{DAMPING_HEADER}")?;
    for i in 0..curve.m.len() {
        writeln!(w, "{},{},{},{}", num(curve.m[i]), num(curve.d[i]), num(curve.c[i]), num(curve.k[i]))?;
    }
    Ok(())
}

fn speed_pair(s: WaveSpeed) -> (f64, f64) {
    match s {
        WaveSpeed::Shock(x) => (x, x),
        WaveSpeed::Rarefaction { tail, head } => (tail, head),
        WaveSpeed::Contact | WaveSpeed::Absent => (0.0, 0.0),
    }
}

/// One row per wave of the fan, including absent ones.
pub fn write_fan<W: Write>(mut w: W, fan: &RiemannFan) -> io::Result<()> {
    writeln!(w, "{FAN_HEADER}")?;
    let states = [fan.left, fan.mid1, fan.mid2, fan.right];
    let eps = [fan.strengths.eps1, fan.strengths.eps2, fan.strengths.eps3];
    for i in 0..3 {
        let (tail, head) = speed_pair(fan.speeds[i]);
        let (l, r) = (states[i], states[i + 1]);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            i + 1,
            num(eps[i]),
            num(tail),
            num(head),
            num(l.v),
            num(l.u),
            num(l.lam),
            num(r.v),
            num(r.u),
            num(r.lam)
        )?;
    }
    Ok(())
}

/// Human-readable description of a fan.
pub fn describe_fan(fan: &RiemannFan) -> String {
    if fan.is_trivial() {
        return "no waves\n".into();
    }
    let mut out = String::new();
    let states = [fan.left, fan.mid1, fan.mid2, fan.right];
    let eps = [fan.strengths.eps1, fan.strengths.eps2, fan.strengths.eps3];
    for i in 0..3 {
        let what = match fan.speeds[i] {
            WaveSpeed::Absent => continue,
            WaveSpeed::Shock(s) => format!("shock, speed {}", num(s)),
            WaveSpeed::Rarefaction { tail, head } => format!("rarefaction, speeds [{}, {}]", num(tail), num(head)),
            WaveSpeed::Contact => "contact, speed 0".into(),
        };
        let r = states[i + 1];
        out.push_str(&format!(
            "{}-wave: strength {}, {what}; right state v={} u={} lambda={}\n",
            i + 1,
            num(eps[i]),
            num(r.v),
            num(r.u),
            num(r.lam)
        ));
    }
    out.push_str(&format!("residuals: {} {}\n", num(fan.residuals[0]), num(fan.residuals[1])));
    out
}

fn constant(value: f64, provenance: Provenance) -> Value {
    json!({ "value": value, "provenance": provenance })
}

/// Every constant of the run with its provenance, plus the run diagnostics.
pub fn params_json(tr: &Trajectory) -> Value {
    let p = &tr.params;
    let s = &tr.scheme;
    let pv = &tr.provenance;
    let d = Provenance::Derived;
    json!({
        "constants": {
            "m": constant(p.m, Provenance::Override),
            "nu": constant(s.nu as f64, Provenance::Override),
            "A_o": constant(p.a_o, d),
            "d": constant(p.d, d),
            "c": constant(p.c, d),
            "k_of_m": constant(p.k_of_m, d),
            "xi": constant(p.xi, pv.xi),
            "K": constant(p.k, pv.k),
            "K_np": constant(p.k_np, pv.k_np),
            "C_o": constant(p.c_o, d),
            "mu": constant(p.mu, d),
            "contraction_interaction": constant(p.contraction_interaction, d),
            "contraction_twowave": constant(p.contraction_twowave, d),
            "eta": constant(s.eta, pv.eta),
            "rho": constant(s.rho, pv.rho),
            "s_hat": constant(s.s_hat, pv.s_hat),
        },
        "scheme": s,
        "hypotheses": tr.hypotheses,
        "data_summary": tr.summary,
        "initial": tr.initial,
        "budget": tr.budget,
        "stats": tr.outcome.stats,
        "l_bound": tr.outcome.l_bound,
    })
}

/// Write `snapshots.csv`, `events.csv`, `functionals.csv` and `params.json` into `dir`.
pub fn write_run(dir: &Path, tr: &Trajectory, k_max: usize) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut buf = Vec::new();
    write_snapshots(&mut buf, &tr.outcome.snapshots)?;
    fs::write(dir.join("snapshots.csv"), &buf)?;
    buf.clear();
    write_events(&mut buf, &tr.outcome.events)?;
    fs::write(dir.join("events.csv"), &buf)?;
    buf.clear();
    write_functionals(&mut buf, &tr.outcome.trace, k_max)?;
    fs::write(dir.join("functionals.csv"), &buf)?;
    let text = serde_json::to_string_pretty(&params_json(tr)).expect("params serialize");
    fs::write(dir.join("params.json"), text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::FrontKind;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn wave_encoding() {
        let w = [
            WaveSummary { kind: FrontKind::One, strength: -0.5, order: 1 },
            WaveSummary { kind: FrontKind::NonPhysical, strength: 0.25, order: 3 },
        ];
        assert_eq!(encode_waves(&w), "1:-5.0000000000000000e-1:1;np:2.5000000000000000e-1:3");
    }

    #[test]
    fn damping_rows() {
        let curve = DampingCurve { m: vec![0.5, 1.0], d: vec![0.1, 0.2], c: vec![0.05, 0.2], k: vec![0.4, 0.3], resolution: 3 };
        let mut buf = Vec::new();
        write_damping(&mut buf, &curve).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], DAMPING_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("1.0000000000000000e0,2.0000000000000001e-1,"));
    }
}

//! Export of the 0-1 program in CPLEX LP text format, for cross-checking
//! with external MILP solvers.
//!
//! Variables `x_u{user}_s{server}_l{level}` are 1 when the user is served by
//! that server at that level. The model maximizes total QoE subject to one
//! option per user and per-dimension capacity. Pairs outside coverage are
//! either fixed to zero in `Bounds` or omitted entirely (`compact`).

use std::fmt::Write as _;

use crate::model::Scenario;
use crate::scalar::Scalar;

const TERMS_PER_LINE: usize = 6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LpOptions {
    /// Leave out variables for uncovered user/server pairs.
    pub compact: bool,
}

fn var(sc_user: u32, server: u32, level: usize) -> String {
    format!("x_u{sc_user}_s{server}_l{level}")
}

fn write_terms(out: &mut String, terms: &[(String, String)]) {
    for (t, (coef, name)) in terms.iter().enumerate() {
        if t > 0 && t % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if t == 0 { "" } else { "+ " };
        write!(out, " {sign}{coef} {name}").unwrap();
    }
}

pub fn to_lp<T: Scalar>(sc: &Scenario<T>, opts: LpOptions) -> String {
    let (n, m, q, d) = (sc.users().len(), sc.servers().len(), sc.catalog().len(), sc.dim());
    let covered = |i: usize, j: usize| sc.candidates(i).contains(&j);
    let included = |i: usize, j: usize| !opts.compact || covered(i, j);
    let levels = sc.catalog().levels();

    let mut out = String::new();
    writeln!(out, "\\ Edge user allocation with dynamic QoS levels").unwrap();
    writeln!(out, "\\ users={n} servers={m} levels={q} dimensions={d}").unwrap();
    writeln!(out, "Maximize").unwrap();
    let mut obj = Vec::new();
    for (i, u) in sc.users().iter().enumerate() {
        for (_, s) in sc.servers().iter().enumerate().filter(|(j, _)| included(i, *j)) {
            for lv in levels {
                obj.push((format!("{}", lv.qoe), var(u.id.0, s.id.0, lv.index)));
            }
        }
    }
    out.push_str(" obj:");
    write_terms(&mut out, &obj);
    out.push('\n');

    writeln!(out, "Subject To").unwrap();
    for (i, u) in sc.users().iter().enumerate() {
        let terms: Vec<_> = sc
            .servers()
            .iter()
            .enumerate()
            .filter(|(j, _)| included(i, *j))
            .flat_map(|(_, s)| levels.iter().map(move |lv| ("1".to_string(), var(u.id.0, s.id.0, lv.index))))
            .collect();
        if terms.is_empty() {
            continue;
        }
        write!(out, " one_u{}:", u.id).unwrap();
        write_terms(&mut out, &terms);
        out.push_str(" <= 1\n");
    }
    for (j, s) in sc.servers().iter().enumerate() {
        for k in 0..d {
            let terms: Vec<_> = sc
                .users()
                .iter()
                .enumerate()
                .filter(|(i, _)| included(*i, j))
                .flat_map(|(_, u)| {
                    levels
                        .iter()
                        .filter(move |lv| lv.demand[k] != T::zero())
                        .map(move |lv| (format!("{}", lv.demand[k]), var(u.id.0, s.id.0, lv.index)))
                })
                .collect();
            if terms.is_empty() {
                continue;
            }
            write!(out, " cap_s{}_d{}:", s.id, k).unwrap();
            write_terms(&mut out, &terms);
            writeln!(out, " <= {}", s.capacity[k]).unwrap();
        }
    }

    if !opts.compact {
        writeln!(out, "Bounds").unwrap();
        for (i, u) in sc.users().iter().enumerate() {
            for (_, s) in sc.servers().iter().enumerate().filter(|(j, _)| !covered(i, *j)) {
                for lv in levels {
                    writeln!(out, " {} = 0", var(u.id.0, s.id.0, lv.index)).unwrap();
                }
            }
        }
    }

    writeln!(out, "Binary").unwrap();
    for (_, name) in &obj {
        writeln!(out, " {name}").unwrap();
    }
    writeln!(out, "End").unwrap();
    out
}

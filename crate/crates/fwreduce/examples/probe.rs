//! Scratch probe (temporary) comparing engine output against references.

use fwreduce::engine::{reduce, ReductionConfig, SectorKind};
use fwreduce::references::{diff_report, reference_expression, ReferenceId};
use fwreduce::{Expression, SymbolTable};

fn generic_h(table: &std::sync::Arc<SymbolTable>) -> Expression {
    let mut h = Expression::rest_energy_two_body(table);
    for name in ["EE", "OE", "EO", "OO"] {
        h = &h + &Expression::symbol(table, name);
    }
    h
}

fn main() {
    // 1. Second order, no relation, all 6 permutations vs eq4.
    let t = SymbolTable::two_body(false);
    let h = generic_h(&t);
    let eq4 = reference_expression(ReferenceId::Eq4, &t).unwrap();
    use SectorKind::*;
    let perms: [[SectorKind; 3]; 6] = [
        [Oe, Eo, Oo],
        [Oe, Oo, Eo],
        [Eo, Oe, Oo],
        [Eo, Oo, Oe],
        [Oo, Oe, Eo],
        [Oo, Eo, Oe],
    ];
    for p in perms {
        let config = ReductionConfig {
            sequence: p.to_vec(),
            trunc_order: -2,
            ..ReductionConfig::default()
        };
        let trace = reduce(&h, &config).unwrap();
        let d = diff_report(&trace.transformed, &eq4);
        println!(
            "second-order {:?}: {} ({} terms out)",
            p.iter().map(|k| k.name()).collect::<Vec<_>>(),
            if d.is_empty() { "MATCH" } else { "DIFF" },
            trace.transformed.num_terms()
        );
        if !d.is_empty() {
            println!("{d}");
        }
    }

    // 2. Fourth order with relation vs eq6.
    let tr = SymbolTable::two_body(true);
    let hr = generic_h(&tr);
    let eq6 = reference_expression(ReferenceId::Eq6, &tr).unwrap();
    let config = ReductionConfig::default();
    let trace = reduce(&hr, &config).unwrap();
    let d = diff_report(&trace.transformed, &eq6);
    println!(
        "fourth-order oe,eo,oo: {} ({} terms out, {} in reference)",
        if d.is_empty() { "MATCH" } else { "DIFF" },
        trace.transformed.num_terms(),
        eq6.num_terms()
    );
    if !d.is_empty() {
        println!("{d}");
    }

    // 3. oo-first minus eq6 vs eq8.
    let config_oo = ReductionConfig {
        sequence: vec![Oo, Oe, Eo],
        ..ReductionConfig::default()
    };
    let trace_oo = reduce(&hr, &config_oo).unwrap();
    let eq8 = reference_expression(ReferenceId::Eq8, &tr).unwrap();
    let d = diff_report(&(&trace_oo.transformed - &eq6), &eq8);
    println!(
        "oo-first surplus vs eq8: {}",
        if d.is_empty() { "MATCH" } else { "DIFF" }
    );
    if !d.is_empty() {
        println!("{d}");
    }

    // 4. [S_oe,[S_eo,S_oo]] from the printed first-iteration generators vs eq9.
    let s_oe = reference_expression(ReferenceId::Eq3Oe, &tr).unwrap();
    let s_eo = reference_expression(ReferenceId::Eq3Eo, &tr).unwrap();
    let s_oo = reference_expression(ReferenceId::Eq3Oo, &tr).unwrap();
    let s_ee = fwreduce::comm(&s_oe, &fwreduce::comm(&s_eo, &s_oo));
    let eq9 = reference_expression(ReferenceId::Eq9, &tr).unwrap();
    let d = diff_report(&s_ee, &eq9);
    println!(
        "nested bracket vs eq9: {}",
        if d.is_empty() { "MATCH" } else { "DIFF" }
    );
    if !d.is_empty() {
        println!("{d}");
    }
}

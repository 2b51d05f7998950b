use std::fmt::Write as _;

use crate::cost::Cost;
use crate::strips::Model;

/// A serialized model: every ground action becomes a zero-arity schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PddlDocuments {
    pub domain: String,
    pub problem: String,
}

fn cost_literal(c: Cost) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("(/ {} {})", c.numer(), c.denom())
    }
}

fn atoms<'a>(names: impl IntoIterator<Item = &'a str>) -> String {
    names.into_iter().map(|n| format!("({n})")).collect::<Vec<_>>().join(" ")
}

pub fn serialize_model(model: &Model) -> PddlDocuments {
    let mut d = String::new();
    let _ = writeln!(d, "(define (domain {})", model.domain_name());
    let _ = writeln!(d, "  (:requirements :strips :action-costs)");
    if model.fluent_count() == 0 {
        let _ = writeln!(d, "  (:predicates)");
    } else {
        let _ = writeln!(d, "  (:predicates");
        for f in model.fluent_names() {
            let _ = writeln!(d, "    ({f})");
        }
        let _ = writeln!(d, "  )");
    }
    let _ = write!(d, "  (:functions (total-cost) - number)");
    for a in model.actions() {
        let _ = write!(d, "\n  (:action {}\n    :parameters ()", a.name);
        let _ = write!(d, "\n    :precondition (and {})", atoms(model.fluent_set_names(&a.pre)));
        let mut effects: Vec<String> = model.fluent_set_names(&a.add).into_iter().map(|f| format!("({f})")).collect();
        effects.extend(model.fluent_set_names(&a.del).into_iter().map(|f| format!("(not ({f}))")));
        effects.push(format!("(increase (total-cost) {})", cost_literal(a.cost)));
        let _ = write!(d, "\n    :effect (and {}))", effects.join(" "));
    }
    d.push_str(")\n");

    let mut p = String::new();
    let _ = writeln!(p, "(define (problem {})", model.problem_name());
    let _ = writeln!(p, "  (:domain {})", model.domain_name());
    let init = atoms(model.fluent_set_names(model.init()));
    let sep = if init.is_empty() { "" } else { " " };
    let _ = writeln!(p, "  (:init {init}{sep}(= (total-cost) 0))");
    let _ = writeln!(p, "  (:goal (and {}))", atoms(model.fluent_set_names(model.goal())));
    let _ = writeln!(p, "  (:metric minimize (total-cost)))");
    PddlDocuments { domain: d, problem: p }
}

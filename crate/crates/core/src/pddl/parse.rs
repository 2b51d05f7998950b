//! Parsing and grounding of the `:strips` / `:typing` / `:action-costs` subset.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::sexpr::{read_one, Pos, ReadError, Sexp};
use super::{Document, PddlError};
use crate::cost::Cost;
use crate::strips::{ActionSpec, Model, ModelSpec};

pub const DEFAULT_GROUNDING_CAP: usize = 200_000;

const SUPPORTED_REQUIREMENTS: [&str; 3] = [":strips", ":typing", ":action-costs"];

#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    /// Upper bound on the number of ground actions instantiated.
    pub grounding_cap: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { grounding_cap: DEFAULT_GROUNDING_CAP }
    }
}

/// Parses and grounds a domain/problem pair with default options.
pub fn parse_domain_problem(domain_text: &str, problem_text: &str) -> Result<Model, PddlError> {
    parse_with_options(domain_text, problem_text, ParseOptions::default())
}

pub fn parse_with_options(domain_text: &str, problem_text: &str, options: ParseOptions) -> Result<Model, PddlError> {
    let domain = DomainParser::parse(domain_text)?;
    let problem = ProblemParser::parse(problem_text, &domain)?;
    let spec = ground(&domain, &problem, options)?;
    Ok(Model::from_spec(spec)?)
}

/// Canonical ground symbol: upper case, `-` folded to `_`, arguments joined by `_`.
pub fn ground_symbol(head: &str, args: &[&str]) -> String {
    let mut s = normalize(head);
    for a in args {
        s.push('_');
        s.push_str(&normalize(a));
    }
    s
}

fn normalize(s: &str) -> String {
    s.to_ascii_uppercase().replace('-', "_")
}

fn syntax(doc: Document, pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Syntax { doc, line: pos.line, col: pos.col, message: message.into() }
}

fn read(doc: Document, text: &str) -> Result<Sexp, PddlError> {
    read_one(text).map_err(|ReadError { pos, message }| syntax(doc, pos, message))
}

#[derive(Clone, Debug)]
enum Term {
    Var(String),
    Const(String),
}

#[derive(Clone, Debug)]
struct AtomTemplate {
    predicate: String,
    args: Vec<Term>,
    pos: Pos,
}

#[derive(Clone, Debug)]
enum CostExpr {
    Literal(Cost),
    Function { name: String, args: Vec<Term>, pos: Pos },
}

#[derive(Clone, Debug)]
struct Schema {
    name: String,
    params: Vec<(String, String)>,
    pre: Vec<AtomTemplate>,
    add: Vec<AtomTemplate>,
    del: Vec<AtomTemplate>,
    costs: Vec<CostExpr>,
}

#[derive(Debug)]
struct Domain {
    name: String,
    action_costs: bool,
    /// child type -> parent type
    types: HashMap<String, String>,
    constants: Vec<(String, String)>,
    predicates: BTreeMap<String, Vec<(String, String)>>,
    functions: BTreeMap<String, usize>,
    schemas: Vec<Schema>,
}

#[derive(Debug)]
struct Problem {
    name: String,
    objects: Vec<(String, String)>,
    init: Vec<(String, Vec<String>, Pos)>,
    function_values: HashMap<(String, Vec<String>), Cost>,
    goal: Vec<AtomTemplate>,
}

fn lower_atom(doc: Document, e: &Sexp) -> Result<String, PddlError> {
    e.as_atom()
        .map(str::to_ascii_lowercase)
        .ok_or_else(|| syntax(doc, e.pos(), "expected a symbol"))
}

fn expect_list(doc: Document, e: &Sexp) -> Result<&[Sexp], PddlError> {
    e.as_list().ok_or_else(|| syntax(doc, e.pos(), "expected a list"))
}

/// `a b - t c` → [(a,t),(b,t),(c,object)]
fn typed_list(doc: Document, items: &[Sexp]) -> Result<Vec<(String, String)>, PddlError> {
    let mut out = Vec::new();
    let mut pending = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let name = lower_atom(doc, &items[i])?;
        if name == "-" {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| syntax(doc, items[i].pos(), "missing type after `-`"))?;
            if ty.head().as_deref() == Some("either") {
                return Err(PddlError::UnsupportedFeature("either-types".into()));
            }
            let ty = lower_atom(doc, ty)?;
            out.extend(pending.drain(..).map(|n| (n, ty.clone())));
            i += 2;
        } else {
            pending.push(name);
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|n| (n, "object".to_string())));
    Ok(out)
}

fn check_requirements(doc: Document, items: &[Sexp]) -> Result<bool, PddlError> {
    let mut costs = false;
    for r in items {
        let r = lower_atom(doc, r)?;
        if !SUPPORTED_REQUIREMENTS.contains(&r.as_str()) {
            return Err(PddlError::UnsupportedFeature(r));
        }
        costs |= r == ":action-costs";
    }
    Ok(costs)
}

fn term(doc: Document, e: &Sexp) -> Result<Term, PddlError> {
    let s = lower_atom(doc, e)?;
    Ok(match s.strip_prefix('?') {
        Some(_) => Term::Var(s),
        None => Term::Const(s),
    })
}

fn atom_template(doc: Document, e: &Sexp) -> Result<AtomTemplate, PddlError> {
    let items = expect_list(doc, e)?;
    let head = items.first().ok_or_else(|| syntax(doc, e.pos(), "empty atom"))?;
    Ok(AtomTemplate {
        predicate: lower_atom(doc, head)?,
        args: items[1..].iter().map(|a| term(doc, a)).collect::<Result<_, _>>()?,
        pos: e.pos(),
    })
}

fn unsupported_formula(head: &str) -> Option<&'static str> {
    Some(match head {
        "not" => "negative-preconditions",
        "or" | "imply" => "disjunctive-preconditions",
        "exists" | "forall" => "quantified-preconditions",
        "=" => "equality",
        ">" | "<" | ">=" | "<=" => "numeric-fluents",
        "when" => "conditional-effects",
        _ => return None,
    })
}

/// Positive conjunction of atoms.
fn conjunction(doc: Document, e: &Sexp, out: &mut Vec<AtomTemplate>) -> Result<(), PddlError> {
    let items = expect_list(doc, e)?;
    if items.is_empty() {
        return Ok(());
    }
    let head = e.head().unwrap_or_default();
    if head == "and" {
        for sub in &items[1..] {
            conjunction(doc, sub, out)?;
        }
        return Ok(());
    }
    if let Some(feature) = unsupported_formula(&head) {
        return Err(PddlError::UnsupportedFeature(feature.into()));
    }
    out.push(atom_template(doc, e)?);
    Ok(())
}

fn numeric_literal(doc: Document, e: &Sexp) -> Result<Cost, PddlError> {
    match e {
        Sexp::Atom(s, pos) => s.parse::<Cost>().map_err(|err| syntax(doc, *pos, err.to_string())),
        Sexp::List(items, pos) => {
            if e.head().as_deref() == Some("/") && items.len() == 3 {
                let n = numeric_literal(doc, &items[1])?;
                let d = numeric_literal(doc, &items[2])?;
                if d.is_zero() {
                    return Err(syntax(doc, *pos, "division by zero"));
                }
                let (nn, nd, dn, dd) = (n.numer() as i128, n.denom() as i128, d.numer() as i128, d.denom() as i128);
                let (num, den) = (nn * dd, nd * dn);
                let g = gcd(num, den);
                let (num, den) = (num / g, den / g);
                let num = i64::try_from(num).map_err(|_| syntax(doc, *pos, "cost out of range"))?;
                let den = i64::try_from(den).map_err(|_| syntax(doc, *pos, "cost out of range"))?;
                Cost::ratio(num, den).map_err(|err| syntax(doc, *pos, err.to_string()))
            } else {
                Err(syntax(doc, *pos, "expected a number or (/ n d)"))
            }
        }
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn cost_expr(doc: Document, e: &Sexp) -> Result<CostExpr, PddlError> {
    if e.as_atom().is_some() || e.head().as_deref() == Some("/") {
        return numeric_literal(doc, e).map(CostExpr::Literal);
    }
    let items = expect_list(doc, e)?;
    let head = items.first().ok_or_else(|| syntax(doc, e.pos(), "empty cost expression"))?;
    let name = lower_atom(doc, head)?;
    if matches!(name.as_str(), "+" | "-" | "*") {
        return Err(PddlError::UnsupportedFeature("numeric-fluents".into()));
    }
    Ok(CostExpr::Function {
        name,
        args: items[1..].iter().map(|a| term(doc, a)).collect::<Result<_, _>>()?,
        pos: e.pos(),
    })
}

fn effect(doc: Document, e: &Sexp, schema: &mut Schema) -> Result<(), PddlError> {
    let items = expect_list(doc, e)?;
    if items.is_empty() {
        return Ok(());
    }
    match e.head().unwrap_or_default().as_str() {
        "and" => {
            for sub in &items[1..] {
                effect(doc, sub, schema)?;
            }
        }
        "not" => {
            let inner = items.get(1).ok_or_else(|| syntax(doc, e.pos(), "empty `not`"))?;
            schema.del.push(atom_template(doc, inner)?);
        }
        "increase" => {
            let target = items.get(1).and_then(Sexp::head);
            if items.len() != 3 || target.as_deref() != Some("total-cost") {
                return Err(PddlError::UnsupportedFeature("numeric-fluents".into()));
            }
            schema.costs.push(cost_expr(doc, &items[2])?);
        }
        "decrease" | "assign" | "scale-up" | "scale-down" => {
            return Err(PddlError::UnsupportedFeature("numeric-fluents".into()));
        }
        "when" | "forall" => return Err(PddlError::UnsupportedFeature("conditional-effects".into())),
        _ => schema.add.push(atom_template(doc, e)?),
    }
    Ok(())
}

fn define_header<'a>(doc: Document, root: &'a Sexp, kind: &str) -> Result<(String, &'a [Sexp]), PddlError> {
    let items = expect_list(doc, root)?;
    if root.head().as_deref() != Some("define") || items.len() < 2 {
        return Err(syntax(doc, root.pos(), "expected (define ...)"));
    }
    let header = expect_list(doc, &items[1])?;
    if items[1].head().as_deref() != Some(kind) || header.len() != 2 {
        return Err(syntax(doc, items[1].pos(), format!("expected ({kind} <name>)")));
    }
    Ok((lower_atom(doc, &header[1])?, &items[2..]))
}

struct DomainParser;

impl DomainParser {
    fn parse(text: &str) -> Result<Domain, PddlError> {
        let doc = Document::Domain;
        let root = read(doc, text)?;
        let (name, sections) = define_header(doc, &root, "domain")?;
        let mut domain = Domain {
            name,
            action_costs: false,
            types: HashMap::new(),
            constants: Vec::new(),
            predicates: BTreeMap::new(),
            functions: BTreeMap::new(),
            schemas: Vec::new(),
        };
        for section in sections {
            let items = expect_list(doc, section)?;
            let key = section.head().unwrap_or_default();
            match key.as_str() {
                ":requirements" => domain.action_costs = check_requirements(doc, &items[1..])?,
                ":types" => {
                    for (child, parent) in typed_list(doc, &items[1..])? {
                        if child != "object" {
                            domain.types.insert(child, parent);
                        }
                    }
                }
                ":constants" => domain.constants.extend(typed_list(doc, &items[1..])?),
                ":predicates" => {
                    for p in &items[1..] {
                        let decl = expect_list(doc, p)?;
                        let head = decl.first().ok_or_else(|| syntax(doc, p.pos(), "empty predicate"))?;
                        let pname = lower_atom(doc, head)?;
                        domain.predicates.insert(pname, typed_list(doc, &decl[1..])?);
                    }
                }
                ":functions" => {
                    let mut i = 1;
                    while i < items.len() {
                        if items[i].as_atom() == Some("-") {
                            i += 2;
                            continue;
                        }
                        let decl = expect_list(doc, &items[i])?;
                        let head = decl.first().ok_or_else(|| syntax(doc, items[i].pos(), "empty function"))?;
                        domain.functions.insert(lower_atom(doc, head)?, typed_list(doc, &decl[1..])?.len());
                        i += 1;
                    }
                }
                ":action" => domain.schemas.push(Self::action(doc, section, items)?),
                ":derived" => return Err(PddlError::UnsupportedFeature("derived-predicates".into())),
                ":durative-action" => return Err(PddlError::UnsupportedFeature("durative-actions".into())),
                ":constraints" => return Err(PddlError::UnsupportedFeature("constraints".into())),
                other => return Err(syntax(doc, section.pos(), format!("unknown domain section `{other}`"))),
            }
        }
        for schema in &domain.schemas {
            Self::check_schema(doc, &domain, schema)?;
        }
        Ok(domain)
    }

    fn action(doc: Document, section: &Sexp, items: &[Sexp]) -> Result<Schema, PddlError> {
        let name = items
            .get(1)
            .ok_or_else(|| syntax(doc, section.pos(), "action without a name"))
            .and_then(|n| lower_atom(doc, n))?;
        let mut schema = Schema { name, params: Vec::new(), pre: Vec::new(), add: Vec::new(), del: Vec::new(), costs: Vec::new() };
        let mut i = 2;
        while i < items.len() {
            let key = lower_atom(doc, &items[i])?;
            let value = items
                .get(i + 1)
                .ok_or_else(|| syntax(doc, items[i].pos(), format!("missing value for `{key}`")))?;
            match key.as_str() {
                ":parameters" => schema.params = typed_list(doc, expect_list(doc, value)?)?,
                ":precondition" => conjunction(doc, value, &mut schema.pre)?,
                ":effect" => effect(doc, value, &mut schema)?,
                other => return Err(syntax(doc, items[i].pos(), format!("unknown action key `{other}`"))),
            }
            i += 2;
        }
        Ok(schema)
    }

    fn check_schema(doc: Document, domain: &Domain, schema: &Schema) -> Result<(), PddlError> {
        if !schema.costs.is_empty() && !domain.action_costs {
            return Err(PddlError::UnsupportedFeature("total-cost without :action-costs".into()));
        }
        let vars: BTreeSet<&str> = schema.params.iter().map(|(v, _)| v.as_str()).collect();
        let check_terms = |args: &[Term], pos: Pos| -> Result<(), PddlError> {
            for t in args {
                if let Term::Var(v) = t {
                    if !vars.contains(v.as_str()) {
                        return Err(syntax(doc, pos, format!("unbound variable `{v}` in `{}`", schema.name)));
                    }
                }
            }
            Ok(())
        };
        for atom in schema.pre.iter().chain(&schema.add).chain(&schema.del) {
            let params = domain
                .predicates
                .get(&atom.predicate)
                .ok_or_else(|| syntax(doc, atom.pos, format!("undeclared predicate `{}`", atom.predicate)))?;
            if params.len() != atom.args.len() {
                return Err(syntax(doc, atom.pos, format!("wrong arity for `{}`", atom.predicate)));
            }
            check_terms(&atom.args, atom.pos)?;
        }
        for c in &schema.costs {
            if let CostExpr::Function { name, args, pos } = c {
                match domain.functions.get(name) {
                    Some(arity) if *arity == args.len() => check_terms(args, *pos)?,
                    Some(_) => return Err(syntax(doc, *pos, format!("wrong arity for function `{name}`"))),
                    None => return Err(syntax(doc, *pos, format!("undeclared function `{name}`"))),
                }
            }
        }
        Ok(())
    }
}

struct ProblemParser;

impl ProblemParser {
    fn parse(text: &str, domain: &Domain) -> Result<Problem, PddlError> {
        let doc = Document::Problem;
        let root = read(doc, text)?;
        let (name, sections) = define_header(doc, &root, "problem")?;
        let mut problem = Problem {
            name,
            objects: Vec::new(),
            init: Vec::new(),
            function_values: HashMap::new(),
            goal: Vec::new(),
        };
        for section in sections {
            let items = expect_list(doc, section)?;
            match section.head().unwrap_or_default().as_str() {
                ":domain" => {
                    let d = items
                        .get(1)
                        .ok_or_else(|| syntax(doc, section.pos(), "missing domain name"))
                        .and_then(|d| lower_atom(doc, d))?;
                    if d != domain.name {
                        return Err(syntax(doc, section.pos(), format!("problem is for domain `{d}`, not `{}`", domain.name)));
                    }
                }
                ":requirements" => {
                    check_requirements(doc, &items[1..])?;
                }
                ":objects" => problem.objects.extend(typed_list(doc, &items[1..])?),
                ":init" => {
                    for fact in &items[1..] {
                        Self::init_fact(doc, fact, &mut problem)?;
                    }
                }
                ":goal" => {
                    let g = items.get(1).ok_or_else(|| syntax(doc, section.pos(), "missing goal"))?;
                    conjunction(doc, g, &mut problem.goal)?;
                }
                ":metric" => {
                    let ok = items.len() == 3
                        && items[1].as_atom().map(str::to_ascii_lowercase).as_deref() == Some("minimize")
                        && items[2].head().as_deref() == Some("total-cost");
                    if !ok {
                        return Err(PddlError::UnsupportedFeature("metric other than (minimize (total-cost))".into()));
                    }
                }
                other => return Err(syntax(doc, section.pos(), format!("unknown problem section `{other}`"))),
            }
        }
        Ok(problem)
    }

    fn init_fact(doc: Document, fact: &Sexp, problem: &mut Problem) -> Result<(), PddlError> {
        let items = expect_list(doc, fact)?;
        match fact.head().unwrap_or_default().as_str() {
            "=" => {
                if items.len() != 3 {
                    return Err(syntax(doc, fact.pos(), "malformed numeric initialisation"));
                }
                let target = expect_list(doc, &items[1])?;
                let fname = target
                    .first()
                    .ok_or_else(|| syntax(doc, items[1].pos(), "empty function term"))
                    .and_then(|f| lower_atom(doc, f))?;
                let args = target[1..].iter().map(|a| lower_atom(doc, a)).collect::<Result<Vec<_>, _>>()?;
                let value = numeric_literal(doc, &items[2])?;
                problem.function_values.insert((fname, args), value);
            }
            "not" => return Err(syntax(doc, fact.pos(), "negative literal in :init")),
            _ => {
                let a = atom_template(doc, fact)?;
                let mut args = Vec::with_capacity(a.args.len());
                for t in a.args {
                    match t {
                        Term::Const(c) => args.push(c),
                        Term::Var(v) => return Err(syntax(doc, a.pos, format!("variable `{v}` in :init"))),
                    }
                }
                problem.init.push((a.predicate, args, a.pos));
            }
        }
        Ok(())
    }
}

fn is_subtype<'a>(types: &'a HashMap<String, String>, mut t: &'a str, target: &str) -> bool {
    for _ in 0..=types.len() {
        if t == target {
            return true;
        }
        match types.get(t) {
            Some(parent) => t = parent,
            None => return target == "object",
        }
    }
    false
}

fn ground(domain: &Domain, problem: &Problem, options: ParseOptions) -> Result<ModelSpec, PddlError> {
    let mut objects: BTreeMap<String, String> = BTreeMap::new();
    for (o, t) in domain.constants.iter().chain(&problem.objects) {
        objects.insert(o.clone(), t.clone());
    }
    let candidates = |ty: &str| -> Vec<&str> {
        objects
            .iter()
            .filter(|(_, t)| is_subtype(&domain.types, t, ty))
            .map(|(o, _)| o.as_str())
            .collect()
    };

    // Fluent symbols with collision detection.
    let mut symbol_owner: HashMap<String, (String, Vec<String>)> = HashMap::new();
    let mut fluents = BTreeSet::new();
    let mut intern = |pred: &str, args: &[&str]| -> Result<String, PddlError> {
        let name = ground_symbol(pred, args);
        let key = (pred.to_string(), args.iter().map(|s| s.to_string()).collect::<Vec<_>>());
        match symbol_owner.get(&name) {
            Some(owner) if *owner != key => {
                return Err(PddlError::SymbolCollision(name));
            }
            Some(_) => {}
            None => {
                symbol_owner.insert(name.clone(), key);
            }
        }
        fluents.insert(name.clone());
        Ok(name)
    };

    for (pred, params) in &domain.predicates {
        let lists: Vec<Vec<&str>> = params.iter().map(|(_, t)| candidates(t)).collect();
        for combo in Odometer::new(&lists) {
            intern(pred, &combo)?;
        }
    }

    let doc = Document::Problem;
    let mut init = BTreeSet::new();
    for (pred, args, pos) in &problem.init {
        let params = domain
            .predicates
            .get(pred)
            .ok_or_else(|| syntax(doc, *pos, format!("undeclared predicate `{pred}`")))?;
        if params.len() != args.len() {
            return Err(syntax(doc, *pos, format!("wrong arity for `{pred}`")));
        }
        for a in args {
            if !objects.contains_key(a) {
                return Err(syntax(doc, *pos, format!("unknown object `{a}`")));
            }
        }
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        init.insert(intern(pred, &args)?);
    }
    let mut goal = BTreeSet::new();
    for atom in &problem.goal {
        let params = domain
            .predicates
            .get(&atom.predicate)
            .ok_or_else(|| syntax(doc, atom.pos, format!("undeclared predicate `{}`", atom.predicate)))?;
        if params.len() != atom.args.len() {
            return Err(syntax(doc, atom.pos, format!("wrong arity for `{}`", atom.predicate)));
        }
        let mut args = Vec::new();
        for t in &atom.args {
            match t {
                Term::Const(c) if objects.contains_key(c) => args.push(c.as_str()),
                Term::Const(c) => return Err(syntax(doc, atom.pos, format!("unknown object `{c}`"))),
                Term::Var(v) => return Err(syntax(doc, atom.pos, format!("variable `{v}` in goal"))),
            }
        }
        goal.insert(intern(&atom.predicate, &args)?);
    }

    let mut per_schema = Vec::with_capacity(domain.schemas.len());
    let mut total: u128 = 0;
    for schema in &domain.schemas {
        let lists: Vec<Vec<&str>> = schema.params.iter().map(|(_, t)| candidates(t)).collect();
        total += lists.iter().map(|l| l.len() as u128).product::<u128>();
        if total > options.grounding_cap as u128 {
            return Err(PddlError::GroundingExplosion { count: total, cap: options.grounding_cap });
        }
        per_schema.push(lists);
    }

    let mut actions: BTreeMap<String, ActionSpec> = BTreeMap::new();
    let mut action_owner: HashMap<String, (String, Vec<String>)> = HashMap::new();
    for (schema, lists) in domain.schemas.iter().zip(&per_schema) {
        for combo in Odometer::new(lists) {
            let binding: HashMap<&str, &str> =
                schema.params.iter().map(|(v, _)| v.as_str()).zip(combo.iter().copied()).collect();
            let resolve = |args: &[Term], pos: Pos| -> Result<Vec<String>, PddlError> {
                args.iter()
                    .map(|t| match t {
                        Term::Var(v) => Ok(binding[v.as_str()].to_string()),
                        Term::Const(c) if objects.contains_key(c) => Ok(c.clone()),
                        Term::Const(c) => Err(syntax(Document::Domain, pos, format!("unknown constant `{c}`"))),
                    })
                    .collect()
            };
            let mut spec = ActionSpec::default();
            for a in &schema.pre {
                spec.pre.insert(intern(&a.predicate, &as_strs(&resolve(&a.args, a.pos)?))?);
            }
            for a in &schema.add {
                spec.add.insert(intern(&a.predicate, &as_strs(&resolve(&a.args, a.pos)?))?);
            }
            for a in &schema.del {
                spec.del.insert(intern(&a.predicate, &as_strs(&resolve(&a.args, a.pos)?))?);
            }
            spec.cost = if domain.action_costs { Cost::ZERO } else { Cost::ONE };
            for c in &schema.costs {
                spec.cost += match c {
                    CostExpr::Literal(v) => *v,
                    CostExpr::Function { name, args, pos } => {
                        let args: Vec<String> = resolve(args, *pos)?;
                        let key = (name.clone(), args);
                        *problem.function_values.get(&key).ok_or_else(|| {
                            syntax(Document::Domain, *pos, format!("no value for ({} {})", key.0, key.1.join(" ")))
                        })?
                    }
                };
            }
            let name = ground_symbol(&schema.name, &combo);
            let owner = (schema.name.clone(), combo.iter().map(|s| s.to_string()).collect());
            if let Some(prev) = action_owner.insert(name.clone(), owner.clone()) {
                if prev != owner {
                    return Err(PddlError::SymbolCollision(name));
                }
            }
            actions.insert(name, spec);
        }
    }

    Ok(ModelSpec {
        domain_name: domain.name.clone(),
        problem_name: problem.name.clone(),
        tag: Default::default(),
        fluents,
        actions,
        init,
        goal,
    })
}

fn as_strs(xs: &[String]) -> Vec<&str> {
    xs.iter().map(String::as_str).collect()
}

/// Cartesian product over candidate lists, in lexicographic order.
struct Odometer<'a, 'b> {
    lists: &'b [Vec<&'a str>],
    idx: Vec<usize>,
    done: bool,
}

impl<'a, 'b> Odometer<'a, 'b> {
    fn new(lists: &'b [Vec<&'a str>]) -> Self {
        let done = lists.iter().any(|l| l.is_empty());
        Odometer { lists, idx: vec![0; lists.len()], done }
    }
}

impl<'a> Iterator for Odometer<'a, '_> {
    type Item = Vec<&'a str>;
    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.idx.iter().zip(self.lists).map(|(&i, l)| l[i]).collect();
        let mut k = self.idx.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < self.lists[k].len() {
                break;
            }
            self.idx[k] = 0;
        }
        Some(item)
    }
}

//! Check suites over one algebra, and the line-oriented report they produce.
//!
//! Records carry no timing so that a fixed configuration always yields the
//! same bytes. Records are sorted by suite, instance and check name.

use std::cell::OnceCell;
use std::fmt;
use std::ops::Bound;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{validate_effect_algebra, EffectAlgebra, Elem};
use crate::io::spectral_to_json;
use crate::mv::{detect_mv, NotMv};
use crate::observables::{
    check_sharp_additivity, kernel_independence_check, make_observable, sharp_observable, smear,
    verify_smearing, Observable, OutcomeSet, SmearingVerifier,
};
use crate::par::{self, Exec};
use crate::rational::{fmt_q, q, Q};
use crate::rdp::{check_rdp_with, RdpFailure};
use crate::representation::{canonical_from_polytope, Representation, RepresentationError};
use crate::sharp::{is_sharp, sharp_elements, sharp_elements_inner, SharpSet};
use crate::spectral::{
    extend_state, extension_uniqueness, search_alternative_measures, sharp_table, spectral_measure,
    transform_spectral, PhiTransform, SharpState, SpectralMeasure,
};
use crate::states::{
    is_sigma_additive, is_state, state_polytope_with, PolytopeOptions, State, StateError,
    StatePolytope,
};
use crate::zoo::{generate, standard_zoo, DEFAULT_MAX_SIZE};
use crate::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Axioms,
    Rdp,
    Sharp,
    States,
    Representation,
    Smearing,
    Spectral,
    Extension,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Axioms,
        Suite::Rdp,
        Suite::Sharp,
        Suite::States,
        Suite::Representation,
        Suite::Smearing,
        Suite::Spectral,
        Suite::Extension,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Rdp => "rdp",
            Suite::Sharp => "sharp",
            Suite::States => "states",
            Suite::Representation => "representation",
            Suite::Smearing => "smearing",
            Suite::Spectral => "spectral",
            Suite::Extension => "extension",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Parses a comma-separated list of suite names; `all` selects every suite.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>, String> {
    let mut out = vec![];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(part.parse()?);
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err("no suite selected".into());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Info,
}

impl Status {
    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
            Status::Info => "INFO",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub suite: Suite,
    pub instance: String,
    pub check: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub seed: u64,
    pub max_size: usize,
    /// Number of seeded random mixtures tested besides the vertices.
    pub mixtures: usize,
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            max_size: DEFAULT_MAX_SIZE,
            mixtures: 10,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(mut records: Vec<Record>) -> Self {
        records.sort_by(|a, b| {
            (a.suite, &a.instance, &a.check).cmp(&(b.suite, &b.instance, &b.check))
        });
        Report { records }
    }

    pub fn count(&self, s: Status) -> usize {
        self.records.iter().filter(|r| r.status == s).count()
    }

    pub fn any_failed(&self) -> bool {
        self.count(Status::Fail) > 0
    }

    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.any_failed())
    }

    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("serializable") + "\n")
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out += &format!(
                "{} {:<14} {:<28} {:<24} {}\n",
                r.status.tag(),
                r.suite,
                r.instance,
                r.check,
                r.detail
            );
        }
        out += &format!(
            "{} records: {} passed, {} failed, {} skipped, {} info\n",
            self.records.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip),
            self.count(Status::Info),
        );
        out
    }
}

/// Lazily computed shared results for one algebra.
struct Ctx<'a> {
    name: &'a str,
    m: &'a EffectAlgebra,
    cfg: RunConfig,
    rdp: OnceCell<Verdict<RdpFailure>>,
    poly: OnceCell<Result<StatePolytope, StateError>>,
    rep: OnceCell<Result<Representation, RepresentationError>>,
    sharp: OnceCell<SharpSet>,
    out: Vec<Record>,
}

impl<'a> Ctx<'a> {
    fn push(&mut self, suite: Suite, check: &str, status: Status, detail: impl Into<String>) {
        self.out.push(Record {
            suite,
            instance: self.name.to_string(),
            check: check.to_string(),
            status,
            detail: detail.into(),
        });
    }

    fn verdict<W>(
        &mut self,
        suite: Suite,
        check: &str,
        v: Verdict<W>,
        pass: &str,
        fail: impl FnOnce(W) -> String,
    ) {
        match v {
            Verdict::Holds => self.push(suite, check, Status::Pass, pass),
            Verdict::Fails(w) => {
                let d = fail(w);
                self.push(suite, check, Status::Fail, d)
            }
        }
    }

    fn l(&self, e: Elem) -> &str {
        self.m.label(e)
    }

    fn labels(&self, es: &[Elem]) -> String {
        let v: Vec<&str> = es.iter().map(|&e| self.l(e)).collect();
        format!("[{}]", v.join(", "))
    }

    fn rdp(&self) -> &Verdict<RdpFailure> {
        self.rdp
            .get_or_init(|| check_rdp_with(self.m, self.cfg.exec))
    }

    fn poly(&self) -> &Result<StatePolytope, StateError> {
        self.poly.get_or_init(|| {
            let opts = PolytopeOptions {
                max_size: self.cfg.max_size,
                exec: self.cfg.exec,
                ..Default::default()
            };
            state_polytope_with(self.m, opts)
        })
    }

    fn sharp(&self) -> &SharpSet {
        self.sharp
            .get_or_init(|| sharp_elements_inner(self.m, false).expect("no verification requested"))
    }

    fn rep(&self) -> &Result<Representation, RepresentationError> {
        self.rep.get_or_init(|| {
            if !self.rdp().holds() {
                return Err(RepresentationError::RdpRequired);
            }
            match self.poly() {
                Ok(p) => canonical_from_polytope(self.m, p),
                Err(e) => Err(e.clone().into()),
            }
        })
    }

    /// Vertices followed by seeded mixtures.
    fn test_states(&self) -> Vec<State> {
        match self.poly() {
            Ok(p) => {
                let mut v = p.vertices.clone();
                v.extend(p.random_mixtures(self.cfg.mixtures, self.cfg.seed));
                v
            }
            Err(_) => vec![],
        }
    }
}

/// Runs `suites` on one algebra and returns the (unsorted) records.
pub fn run_suites(name: &str, m: &EffectAlgebra, suites: &[Suite], cfg: RunConfig) -> Vec<Record> {
    let mut cx = Ctx {
        name,
        m,
        cfg,
        rdp: OnceCell::new(),
        poly: OnceCell::new(),
        rep: OnceCell::new(),
        sharp: OnceCell::new(),
        out: vec![],
    };
    for &s in suites {
        match s {
            Suite::Axioms => axioms(&mut cx),
            Suite::Rdp => rdp(&mut cx),
            Suite::Sharp => sharp(&mut cx),
            Suite::States => states(&mut cx),
            Suite::Representation => with_rep(&mut cx, s, representation),
            Suite::Smearing => with_rep(&mut cx, s, smearing),
            Suite::Spectral => with_rep(&mut cx, s, spectral),
            Suite::Extension => with_rep(&mut cx, s, extension),
        }
    }
    cx.out
}

/// Runs `suites` on every member of the standard zoo within `max_size`.
pub fn run_zoo(suites: &[Suite], cfg: RunConfig) -> Report {
    let zoo: Vec<_> = standard_zoo()
        .into_iter()
        .filter(|f| f.size() <= cfg.max_size)
        .collect();
    let per = par::map(cfg.exec, &zoo, |f| {
        let m = generate(f, cfg.max_size).expect("zoo members are valid");
        run_suites(
            &f.to_string(),
            &m,
            suites,
            RunConfig {
                exec: Exec::Sequential,
                ..cfg
            },
        )
    });
    Report::new(per.into_iter().flatten().collect())
}

fn axioms(cx: &mut Ctx) {
    const S: Suite = Suite::Axioms;
    let m = cx.m;
    match validate_effect_algebra(&m.to_raw()) {
        Ok(_) => {
            let d = format!(
                "{} elements, {} defined sums",
                m.len(),
                m.defined_sums().count()
            );
            cx.push(S, "validate", Status::Pass, d)
        }
        Err(e) => cx.push(S, "validate", Status::Fail, e.to_string()),
    }
    let bad = m.elements().find(|&a| m.supplement(m.supplement(a)) != a);
    cx.verdict(
        S,
        "supplement_involution",
        bad.map_or(Verdict::Holds, Verdict::Fails),
        "a'' = a for all a",
        |a| format!("fails at {}", m.label(a)),
    );
    let bad = m
        .elements()
        .flat_map(|a| m.elements().map(move |b| (a, b)))
        .find(|&(a, b)| m.leq(a, b) && !m.leq(m.supplement(b), m.supplement(a)));
    cx.verdict(
        S,
        "order_reverses_supplement",
        bad.map_or(Verdict::Holds, Verdict::Fails),
        "a <= b implies b' <= a'",
        |(a, b)| format!("fails at {} <= {}", m.label(a), m.label(b)),
    );
    let bad = m
        .elements()
        .flat_map(|a| m.elements().map(move |b| (a, b)))
        .find(|&(a, b)| {
            m.leq(a, b) && m.elements().filter(|&c| m.sum(a, c) == Some(b)).count() != 1
        });
    cx.verdict(
        S,
        "unique_difference",
        bad.map_or(Verdict::Holds, Verdict::Fails),
        "b - a unique whenever a <= b",
        |(a, b)| format!("{} - {} not unique", m.label(b), m.label(a)),
    );
    let d = match detect_mv(m) {
        Ok(_) => "MV-algebra".to_string(),
        Err(NotMv::NotLattice { a, b }) => {
            format!("not a lattice: {} and {}", m.label(a), m.label(b))
        }
        Err(NotMv::OplusUndefined { a, b }) => format!(
            "a + (a' meet b) undefined at {}, {}",
            m.label(a),
            m.label(b)
        ),
        Err(NotMv::AxiomsFail(v)) => {
            let fs: Vec<String> = v
                .iter()
                .map(|(ax, w)| format!("{ax} at {}", cx.labels(w)))
                .collect();
            format!("not MV: {}", fs.join("; "))
        }
    };
    cx.push(S, "mv_structure", Status::Info, d);
}

fn rdp(cx: &mut Ctx) {
    const S: Suite = Suite::Rdp;
    let v = cx.rdp().clone();
    let m = cx.m;
    cx.verdict(S, "rdp", v.clone(), "every equal-sum pair refines", |f| {
        let q = f.instance;
        format!(
            "{} + {} = {} + {} has no refinement; {} matrices examined",
            m.label(q.a1),
            m.label(q.a2),
            m.label(q.b1),
            m.label(q.b2),
            f.matrices_examined
        )
    });
    if v.holds() {
        let d = if detect_mv(m).is_ok() {
            "RDP and MV"
        } else {
            "RDP but not MV"
        };
        cx.push(S, "rdp_implies_mv", Status::Info, d);
    }
}

fn sharp(cx: &mut Ctx) {
    const S: Suite = Suite::Sharp;
    let m = cx.m;
    let members = cx.sharp().members.clone();
    cx.push(S, "sharp_elements", Status::Info, cx.labels(&members));
    let open = members.iter().find(|&&a| !is_sharp(m, m.supplement(a)));
    cx.verdict(
        S,
        "closed_under_supplement",
        open.map_or(Verdict::Holds, Verdict::Fails),
        "Sh(M)' = Sh(M)",
        |a| format!("{}' not sharp", m.label(*a)),
    );
    if cx.rdp().holds() {
        match sharp_elements(m) {
            Ok(s) if s.boolean_verified => {
                let d = format!("Boolean algebra with {} atoms", s.atoms(m).len());
                cx.push(S, "boolean_structure", Status::Pass, d)
            }
            Ok(_) => cx.push(S, "boolean_structure", Status::Fail, "laws not verified"),
            Err(e) => cx.push(S, "boolean_structure", Status::Fail, e.to_string()),
        }
    } else {
        cx.push(S, "boolean_structure", Status::Skip, "requires RDP");
    }
}

fn states(cx: &mut Ctx) {
    const S: Suite = Suite::States;
    let m = cx.m;
    let poly = match cx.poly() {
        Ok(p) => p.clone(),
        Err(e) => {
            let d = e.to_string();
            cx.push(S, "polytope", Status::Fail, d);
            return;
        }
    };
    let d = match poly.dimension {
        Some(d) => format!("{} vertices, dimension {d}", poly.vertices.len()),
        None => "empty".into(),
    };
    cx.push(S, "polytope", Status::Info, d);
    let rdp = cx.rdp().holds();
    match (poly.is_empty(), rdp) {
        (false, true) => cx.push(S, "nonempty", Status::Pass, "RDP and S(M) nonempty"),
        (true, true) => cx.push(S, "nonempty", Status::Fail, "RDP but no state"),
        (e, false) => cx.push(
            S,
            "nonempty",
            Status::Info,
            if e { "no state" } else { "has states" },
        ),
    }
    let check_all = |ss: &[State]| {
        ss.iter()
            .enumerate()
            .find_map(|(i, s)| is_state(m, &s.values).err().map(|e| (i, e)))
    };
    let v = check_all(&poly.vertices).map_or(Verdict::Holds, Verdict::Fails);
    let n = poly.vertices.len();
    cx.verdict(
        S,
        "vertices_are_states",
        v,
        &format!("{n} vertices"),
        |(i, e)| format!("vertex {i}: {e}"),
    );
    let mixes = poly.random_mixtures(cx.cfg.mixtures, cx.cfg.seed);
    let v = check_all(&mixes).map_or(Verdict::Holds, Verdict::Fails);
    cx.verdict(
        S,
        "mixtures_are_states",
        v,
        &format!("{} seeded mixtures", mixes.len()),
        |(i, e)| format!("mixture {i}: {e}"),
    );
    let v = poly
        .vertices
        .iter()
        .position(|s| !is_sigma_additive(m, s))
        .map_or(Verdict::Holds, Verdict::Fails);
    cx.verdict(
        S,
        "sigma_additive",
        v,
        "finite chains are eventually constant",
        |i| format!("vertex {i}"),
    );
    let sep = crate::states::separating(&poly);
    cx.push(
        S,
        "separating",
        Status::Info,
        if sep {
            "states separate elements"
        } else {
            "not separating"
        },
    );
}

fn with_rep(cx: &mut Ctx, s: Suite, f: fn(&mut Ctx, &Representation)) {
    match cx.rep() {
        Ok(rep) => {
            let rep = rep.clone();
            f(cx, &rep)
        }
        Err(RepresentationError::RdpRequired) => {
            cx.push(s, "canonical", Status::Skip, "requires RDP")
        }
        Err(e) => {
            let d = e.to_string();
            cx.push(s, "canonical", Status::Fail, d)
        }
    }
}

fn representation(cx: &mut Ctx, rep: &Representation) {
    const S: Suite = Suite::Representation;
    let m = cx.m;
    let d = format!(
        "|Omega| = {}, |T| = {}",
        rep.carrier_len(),
        rep.tribe().len()
    );
    cx.push(S, "canonical", Status::Pass, d);
    let mut hs = rep.h().to_vec();
    hs.sort();
    hs.dedup();
    let bij = hs.len() == rep.tribe().len() && hs.len() == m.len();
    cx.push(
        S,
        "h_bijective",
        if bij { Status::Pass } else { Status::Fail },
        format!("{} classes", hs.len()),
    );
    let b0 = rep.b0().clone();
    cx.verdict(
        S,
        "b0_sigma_algebra",
        b0.verify(),
        &format!("{} sets, {} atoms", b0.sets.len(), b0.atoms.len()),
        |w| w,
    );
    let eq = b0.equals_s0();
    cx.push(
        S,
        "b0_equals_s0",
        if eq { Status::Pass } else { Status::Fail },
        format!("|S0| = {}", b0.s0.len()),
    );
    cx.verdict(
        S,
        "regular",
        rep.check_regular(),
        "h(f) = 0 iff chi of N(f) in T with h = 0",
        |f| format!("fails at {f}"),
    );
    cx.verdict(
        S,
        "ideal_congruence",
        rep.check_ideal_congruence(),
        "h(f) = h(g) iff N(f - g) in ideal",
        |(f, g)| format!("fails at {f}, {g}"),
    );
    let img = rep.sharp_image();
    let d = format!(
        "image {} vs Sh(M) {}",
        cx.labels(&img.image),
        cx.labels(&img.sharp)
    );
    cx.push(
        S,
        "sharp_image",
        if img.holds() {
            Status::Pass
        } else {
            Status::Fail
        },
        d,
    );
    let bad = rep.tribe().functions().iter().find(|f| !rep.measurable(f));
    cx.verdict(
        S,
        "measurable",
        bad.map_or(Verdict::Holds, Verdict::Fails),
        "every f is B0-measurable",
        |f| format!("{f} not constant on an atom"),
    );

    let fs = rep.tribe().functions();
    let mut count = 0usize;
    let mut failure = None;
    'outer: for f in fs {
        for g in fs {
            if !f.leq(g) {
                continue;
            }
            let (hf, hg) = (rep.apply(f).unwrap(), rep.apply(g).unwrap());
            for c in m.elements().filter(|&c| m.leq(hf, c) && m.leq(c, hg)) {
                count += 1;
                if let Err(e) = rep.sandwich(f, g, c) {
                    failure = Some(format!("{f} <= s <= {g}, h(s) = {}: {e}", m.label(c)));
                    break 'outer;
                }
            }
        }
    }
    match failure {
        None => cx.push(S, "sandwich", Status::Pass, format!("{count} triples")),
        Some(d) => cx.push(S, "sandwich", Status::Fail, d),
    }
    let mut bad = None;
    'join: for (i, f) in fs.iter().enumerate() {
        for g in &fs[i..] {
            let Some(hmax) = rep.apply(&f.max(g)) else {
                continue;
            };
            if m.join(rep.apply(f).unwrap(), rep.apply(g).unwrap()) != Some(hmax) {
                bad = Some(format!("h(max({f}, {g})) is not the join"));
                break 'join;
            }
        }
    }
    cx.verdict(
        S,
        "join_preservation",
        bad.map_or(Verdict::Holds, Verdict::Fails),
        "h(max(f,g)) = h(f) v h(g)",
        |d| d,
    );
}

/// Observables with one, two or three nonzero values summing to `1`, on the
/// support points `{1}`, `{0, 1}` and `{0, 1/2, 1}`.
pub fn small_observables(m: &EffectAlgebra) -> Vec<Observable> {
    let nz: Vec<Elem> = m.elements().filter(|&e| e != m.zero()).collect();
    let mut out =
        vec![make_observable(m, vec![q(1, 1)], vec![m.one()]).expect("trivial observable")];
    for &a in &nz {
        if let Some(b) = m.minus(m.one(), a).filter(|&b| b != m.zero()) {
            out.push(make_observable(m, vec![q(0, 1), q(1, 1)], vec![a, b]).expect("a + a' = 1"));
        }
        for &b in &nz {
            let Some(ab) = m.sum(a, b) else { continue };
            if let Some(c) = m.minus(m.one(), ab).filter(|&c| c != m.zero()) {
                let support = vec![q(0, 1), q(1, 2), q(1, 1)];
                out.push(make_observable(m, support, vec![a, b, c]).expect("a + b + c = 1"));
            }
        }
    }
    out
}

fn smearing(cx: &mut Ctx, rep: &Representation) {
    const S: Suite = Suite::Smearing;
    let m = cx.m;
    match sharp_observable(rep) {
        Ok(xi) => {
            let d = format!(
                "{} atoms mapped to {}",
                xi.atoms.len(),
                cx.labels(&xi.values)
            );
            cx.push(S, "sharp_observable", Status::Pass, d)
        }
        Err(e) => {
            let d = e.to_string();
            cx.push(S, "sharp_observable", Status::Fail, d);
            return;
        }
    }
    cx.verdict(
        S,
        "sharp_additivity",
        check_sharp_additivity(rep),
        "xi additive on disjoint B0 sets",
        |(a, b)| format!("fails at {:#x}, {:#x}", a.0, b.0),
    );
    let obs = small_observables(m);
    let verifier = match SmearingVerifier::new(rep, cx.test_states()) {
        Ok(v) => v,
        Err(e) => {
            cx.push(S, "smearing", Status::Fail, e.to_string());
            return;
        }
    };
    let states = verifier.states();
    let results = par::map(cx.cfg.exec, &obs, |x| -> Result<(), String> {
        let k = smear(rep, x).map_err(|e| e.to_string())?;
        for (i, r) in verifier
            .verify(x, &k)
            .map_err(|e| e.to_string())?
            .iter()
            .enumerate()
        {
            if let Some((mask, res)) = r.first_nonzero() {
                return Err(format!(
                    "state {i}, outcome mask {mask:#b}: residual {}",
                    fmt_q(res)
                ));
            }
        }
        if !kernel_independence_check(rep, x, &states[0], &k, std::slice::from_ref(&k.functions))
            .map_err(|e| e.to_string())?
        {
            return Err("kernel choice changes the integral".into());
        }
        if x.values.iter().all(|&v| is_sharp(m, v)) {
            let b0 = rep.b0();
            let ok = k
                .functions
                .iter()
                .all(|f| f.as_characteristic().is_some_and(|a| b0.contains(a)));
            if !ok {
                return Err("sharp observable with a non-characteristic kernel".into());
            }
        }
        Ok(())
    });
    let failure = obs
        .iter()
        .zip(&results)
        .find_map(|(x, r)| r.as_ref().err().map(|e| (x, e.clone())));
    let d = format!(
        "{} observables x {} states, all residuals 0",
        obs.len(),
        states.len()
    );
    cx.verdict(
        S,
        "smearing",
        failure.map_or(Verdict::Holds, Verdict::Fails),
        &d,
        |(x, e)| format!("observable {}: {e}", cx_labels(m, &x.values)),
    );
}

/// Per-state residual records for one observable: every vertex state and
/// `cfg.mixtures` seeded mixtures, each residual indexed by outcome mask.
pub fn smear_report(
    name: &str,
    m: &EffectAlgebra,
    x: &Observable,
    cfg: RunConfig,
) -> Result<Report, crate::Error> {
    let opts = PolytopeOptions {
        max_size: cfg.max_size,
        exec: cfg.exec,
        ..Default::default()
    };
    let poly = state_polytope_with(m, opts)?;
    if !check_rdp_with(m, cfg.exec).holds() {
        return Err(RepresentationError::RdpRequired.into());
    }
    let rep = canonical_from_polytope(m, &poly)?;
    let k = smear(&rep, x)?;
    let mut out = vec![];
    let mut push = |check: String, status, detail: String| {
        out.push(Record {
            suite: Suite::Smearing,
            instance: name.to_string(),
            check,
            status,
            detail,
        })
    };
    let fs: Vec<String> = k.functions.iter().map(ToString::to_string).collect();
    push("kernel".into(), Status::Info, fs.join(" "));
    let nv = poly.vertices.len();
    let states = poly
        .vertices
        .iter()
        .cloned()
        .chain(poly.random_mixtures(cfg.mixtures, cfg.seed));
    for (i, s) in states.enumerate() {
        let r = verify_smearing(&rep, x, &k, &s)?;
        let rs: Vec<String> = r.residuals.iter().map(fmt_q).collect();
        let kind = if i < nv { "vertex" } else { "mixture" };
        let status = if r.holds() {
            Status::Pass
        } else {
            Status::Fail
        };
        push(
            format!("state:{i:03}"),
            status,
            format!("{kind} residuals [{}]", rs.join(", ")),
        );
    }
    Ok(Report::new(out))
}

fn cx_labels(m: &EffectAlgebra, es: &[Elem]) -> String {
    let v: Vec<&str> = es.iter().map(|&e| m.label(e)).collect();
    format!("[{}]", v.join(", "))
}

fn spectral(cx: &mut Ctx, rep: &Representation) {
    const S: Suite = Suite::Spectral;
    let m = cx.m;
    let measures: Result<Vec<SpectralMeasure>, _> =
        m.elements().map(|a| spectral_measure(rep, a)).collect();
    let measures = match measures {
        Ok(v) => v,
        Err(e) => {
            let d = e.to_string();
            cx.push(S, "measures", Status::Fail, d);
            return;
        }
    };
    for mu in &measures {
        let check = format!("measure:{}", m.label(mu.element));
        cx.push(S, &check, Status::Info, spectral_to_json(m, mu).to_string());
    }
    let states = cx.test_states();
    let bad = measures.iter().find_map(|mu| {
        states
            .iter()
            .position(|s| &mu.integral(s) != s.value(mu.element))
            .map(|i| (mu.element, i))
    });
    let d = format!("{} elements x {} states", m.len(), states.len());
    cx.verdict(
        S,
        "spectral_integral",
        bad.map_or(Verdict::Holds, Verdict::Fails),
        &d,
        |(a, i)| format!("integral differs from m({}) at state {i}", m.label(a)),
    );
    let bad = measures
        .iter()
        .find_map(|mu| masses_problem(m, mu).map(|e| format!("{}: {e}", m.label(mu.element))));
    cx.verdict(
        S,
        "masses",
        bad.map_or(Verdict::Holds, Verdict::Fails),
        "sharp, orthogonal, additive, total 1",
        |d| d,
    );
    let inj = crate::spectral::spectral_injectivity(rep).expect("measures exist");
    cx.verdict(
        S,
        "injectivity",
        inj,
        "a -> Lambda_a injective",
        |(a, b)| format!("Lambda equal for {} and {}", m.label(a), m.label(b)),
    );
    let queries = [
        OutcomeSet::empty(),
        OutcomeSet::point(Q::zero()),
        OutcomeSet::point(q(1, 1)),
        OutcomeSet::points([Q::zero(), q(1, 1)]),
        OutcomeSet::interval(Bound::Included(Q::zero()), Bound::Excluded(q(1, 2))),
        OutcomeSet::interval(Bound::Excluded(q(1, 2)), Bound::Unbounded),
    ];
    let sharp = cx.sharp().members.clone();
    let bad = sharp.iter().find_map(|&a| {
        queries
            .iter()
            .find_map(|e| sharp_table(rep, a, e).err())
            .map(|e| format!("{}: {e}", m.label(a)))
    });
    let d = format!(
        "{} sharp elements x {} outcome sets",
        sharp.len(),
        queries.len()
    );
    cx.verdict(
        S,
        "sharp_table",
        bad.map_or(Verdict::Holds, Verdict::Fails),
        &d,
        |d| d,
    );

    let mut values: Vec<Q> = rep
        .tribe()
        .functions()
        .iter()
        .flat_map(|f| f.0.iter().cloned())
        .collect();
    values.sort();
    values.dedup();
    let phi = PhiTransform::square_on(&values);
    match transform_spectral(rep, m.one(), &phi) {
        Ok(r) => {
            let d = format!(
                "square map on {} support values, {} elements compared",
                values.len(),
                r.elements_compared
            );
            cx.verdict(S, "phi_injectivity", r.injective, &d, |(a, b)| {
                format!("phi(Lambda) equal for {} and {}", m.label(a), m.label(b))
            });
            let kept = m
                .elements()
                .filter(|&a| transform_spectral(rep, a, &phi).is_ok_and(|r| r.integral.holds()))
                .count();
            let d = format!("integral preserved for {kept} of {} elements", m.len());
            cx.push(S, "phi_integral", Status::Info, d);
        }
        Err(e) => {
            let d = e.to_string();
            cx.push(S, "phi_injectivity", Status::Fail, d)
        }
    }
    let sh = cx.sharp().clone();
    let (mut unique, mut skipped) = (0, 0);
    for mu in &measures {
        let r = search_alternative_measures(rep, &sh, mu.element, &values, 4096);
        if r.skipped {
            skipped += 1;
        } else if r.solutions == [mu.clone()] {
            unique += 1;
        }
    }
    let d = format!(
        "no alternative sharp measure for {unique} of {} elements, {skipped} searches skipped",
        m.len()
    );
    cx.push(S, "uniqueness_search", Status::Info, d);
}

fn masses_problem(m: &EffectAlgebra, mu: &SpectralMeasure) -> Option<String> {
    if let Some(&v) = mu.masses.iter().find(|&&v| !is_sharp(m, v)) {
        return Some(format!("mass {} not sharp", m.label(v)));
    }
    if m.sum_all(mu.masses.iter().copied()) != Some(m.one()) {
        return Some("masses do not sum to 1".into());
    }
    let k = mu.support.len();
    let at = |mask: usize| m.sum_all((0..k).filter(|i| mask >> i & 1 == 1).map(|i| mu.masses[i]));
    for e in 0..1usize << k {
        let rest = !e & ((1 << k) - 1);
        let mut f = rest;
        loop {
            let sum = at(e).zip(at(f)).and_then(|(x, y)| m.sum(x, y));
            if sum.is_none() || sum != at(e | f) {
                return Some(format!("not additive on masks {e:#b}, {f:#b}"));
            }
            if f == 0 {
                break;
            }
            f = (f - 1) & rest;
        }
    }
    None
}

/// Point masses on the atoms of `Sh(M)` followed by `count` seeded random
/// weightings.
pub fn sharp_states(m: &EffectAlgebra, sh: &SharpSet, count: usize, seed: u64) -> Vec<SharpState> {
    let atoms = sh.atoms(m);
    let k = atoms.len();
    let mut out: Vec<SharpState> = (0..k)
        .map(|i| {
            let w: Vec<Q> = (0..k)
                .map(|j| if i == j { q(1, 1) } else { Q::zero() })
                .collect();
            SharpState::from_atom_weights(m, sh, &atoms, &w)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=12)).collect();
        let total: i64 = raw.iter().sum();
        let w: Vec<Q> = raw.iter().map(|&x| q(x, total)).collect();
        out.push(SharpState::from_atom_weights(m, sh, &atoms, &w));
    }
    out
}

fn extension(cx: &mut Ctx, rep: &Representation) {
    const S: Suite = Suite::Extension;
    let m = cx.m;
    let sh = cx.sharp().clone();
    let inputs = sharp_states(m, &sh, cx.cfg.mixtures, cx.cfg.seed);
    let results = par::map(cx.cfg.exec, &inputs, |ms| -> Result<(), String> {
        let ext = extend_state(rep, ms).map_err(|e| e.to_string())?;
        if !is_sigma_additive(m, &ext) {
            return Err("extension not sigma-additive".into());
        }
        let b = extension_uniqueness(rep, ms).map_err(|e| e.to_string())?;
        if let Some(e) = b.first_free() {
            let i = e.index();
            return Err(format!(
                "{} ranges over [{}, {}]",
                m.label(e),
                fmt_q(&b.lower[i]),
                fmt_q(&b.upper[i])
            ));
        }
        if b.lower != ext.values {
            return Err("LP optimum differs from the extension".into());
        }
        Ok(())
    });
    let failure = results
        .iter()
        .enumerate()
        .find_map(|(i, r)| r.as_ref().err().map(|e| (i, e.clone())));
    let d = format!(
        "{} states on Sh(M): extension, restriction, atom vs spectral form, LP singleton",
        inputs.len()
    );
    cx.verdict(
        S,
        "extend_state",
        failure.map_or(Verdict::Holds, Verdict::Fails),
        &d,
        |(i, e)| format!("sharp state {i}: {e}"),
    );
    let states = cx.test_states();
    let bad = states.iter().position(|s| {
        let r = SharpState::restrict(&sh, s);
        extend_state(rep, &r).map_or(true, |e| &e != s)
    });
    let d = format!("{} states of M", states.len());
    cx.verdict(
        S,
        "restriction_identity",
        bad.map_or(Verdict::Holds, Verdict::Fails),
        &d,
        |i| format!("state {i} not recovered from its restriction"),
    );
}

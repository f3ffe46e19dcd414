//! The n-th root quantum mutation pipeline and the flip coordinate change `Θ`.
//!
//! A single step `ν_k = ν♯_k ∘ ν′_k` sends a Weyl monomial `Z^t` over the seed `𝒟′`
//! to `Z^{t′} · F^q(X_k, m)` over `𝒟 = μ_k(𝒟′)`, where `t′` is the monomial
//! transport and `m = (1/n) Σ_v Q(k,v) t′_v`. For `m < 0`, `F^q` has binomial
//! denominators; they are cleared to a common right denominator and removed by exact
//! right division, which succeeds precisely when the image is a Laurent polynomial.
//!
//! `Θ` for a flip applies the steps `ν_{v_r}, …, ν_{v_1}` along the staged mutation
//! sequence of the flip.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balance::{is_balanced, is_mutable_balanced, ExponentVector};
use crate::coeff::ScalarLaurent;
use crate::error::{Error, Result};
use crate::quiver::Seed;
use crate::surface::Lattice;
use crate::torus::{lambda2, TorusElement};
use crate::trace::{corner_of_name, ArcTracer, CornerArc};

/// `ν′_k` on exponents: `t′_k = −t_k + Σ_v [Q(v,k)]₊ t_v` (with `Q` of the target seed),
/// other entries unchanged.
pub fn nu_prime_exponent(t: &ExponentVector, k: usize, target: &Seed) -> Result<ExponentVector> {
    if !target.is_mutable(k) {
        return Err(Error::MutationAtFrozenVertex(target.vertices()[k].clone()));
    }
    if t.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            got: t.len(),
        });
    }
    let mut sum = 0;
    for v in 0..t.len() {
        let q = target.two_q(v, k);
        if q > 0 {
            // Q(v,k) is an integer because k is mutable.
            sum += (q / 2) * t[v];
        }
    }
    let mut out = t.clone();
    out[k] = -t[k] + sum;
    Ok(out)
}

/// `m = (1/n) Σ_v Q(k,v) t_v`, which must be an integer.
pub fn adjoint_multiplicity(t: &ExponentVector, k: usize, seed: &Seed, n: usize) -> Result<i64> {
    let num = t.two_q_pairing(seed, k);
    let den = 2 * n as i64;
    if num.rem_euclid(den) != 0 {
        return Err(Error::NotMutableBalanced {
            vertex: seed.vertices()[k].clone(),
            numerator: num,
            n,
        });
    }
    Ok(num / den)
}

/// Coefficients of a polynomial in one commuting variable `x`, lowest degree first.
type XPoly = Vec<ScalarLaurent>;

/// `p · (1 + c x)`.
fn times_binomial(p: &XPoly, c: &ScalarLaurent) -> XPoly {
    let mut out = vec![ScalarLaurent::zero(); p.len() + 1];
    for (d, a) in p.iter().enumerate() {
        out[d] += a;
        out[d + 1] += &(a * c);
    }
    out
}

/// The cleared numerator of `ν_k(P)` and the common right denominator
/// `∏_{r=1}^{M} (1 + q^{−(2r−1)} X_k)`, represented by its degree `M`.
#[derive(Clone, Debug)]
pub struct MutatedFraction {
    pub numerator: TorusElement,
    pub denominator_degree: usize,
    /// Distinct values of `m` over the terms.
    pub m_values: Vec<i64>,
}

/// `ν_k(P)` as a right fraction `N · D_M^{−1}`, over `target = μ_k(seed of P)`.
pub fn mutate_fraction(p: &TorusElement, k: usize, target: &Arc<Seed>, n: usize) -> Result<MutatedFraction> {
    let src = p.seed();
    if src.len() != target.len() {
        return Err(Error::SeedMismatch);
    }
    let mut transported = Vec::with_capacity(p.len());
    for (t, c) in p.terms() {
        let t2 = nu_prime_exponent(t, k, target)?;
        let m = adjoint_multiplicity(&t2, k, target, n)?;
        transported.push((t2, c.clone(), m));
    }
    let big_m = transported.iter().map(|(_, _, m)| (-m).max(0)).max().unwrap_or(0);
    let q = |e: i64| ScalarLaurent::q_pow(n, e);
    let xk = ExponentVector::unit(target.len(), k).scaled(n as i64);
    let mut numerator = TorusElement::zero(target.clone());
    for (t, c, m) in &transported {
        let mut poly: XPoly = vec![ScalarLaurent::one()];
        for r in 1..=*m {
            poly = times_binomial(&poly, &q(2 * r - 1));
        }
        for r in (m.min(&0).abs() + 1)..=big_m {
            poly = times_binomial(&poly, &q(-(2 * r - 1)));
        }
        for (d, g) in poly.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let step = xk.scaled(d as i64);
            let twist = ScalarLaurent::u_pow(lambda2(target, t, &step));
            numerator.add_term(t + &step, &(c * g) * &twist);
        }
    }
    let m_values: BTreeSet<i64> = transported.iter().map(|(_, _, m)| *m).collect();
    Ok(MutatedFraction {
        numerator,
        denominator_degree: big_m as usize,
        m_values: m_values.into_iter().collect(),
    })
}

/// `ν_k(P)` as a Laurent polynomial over `target`, or `NotDivisible` if it is not one.
pub fn mutate_polynomial(p: &TorusElement, k: usize, target: &Arc<Seed>, n: usize) -> Result<TorusElement> {
    mutate_polynomial_recorded(p, k, target, n).map(|(out, _)| out)
}

fn mutate_polynomial_recorded(
    p: &TorusElement,
    k: usize,
    target: &Arc<Seed>,
    n: usize,
) -> Result<(TorusElement, MutatedFraction)> {
    let frac = mutate_fraction(p, k, target, n)?;
    let xk = ExponentVector::unit(target.len(), k).scaled(n as i64);
    let mut out = frac.numerator.clone();
    for r in 1..=frac.denominator_degree as i64 {
        out = out.right_divide_binomial(&xk, &ScalarLaurent::q_pow(n, -(2 * r - 1)))?;
    }
    Ok((out, frac))
}

/// The staged mutation sequence realizing a flip, with its chain of seeds.
#[derive(Clone, Debug)]
pub struct FlipPlan {
    pub edge: usize,
    /// The triangulation before the flip; `Θ` lands in its torus.
    pub source: Lattice,
    /// The flipped triangulation; `Θ` starts from its torus.
    pub target: Lattice,
    /// `map[target vertex] = source vertex`.
    pub vertex_map: Vec<usize>,
    pub stages: Vec<Vec<usize>>,
    /// `v_1, …, v_r` (source vertex indices).
    pub sequence: Vec<usize>,
    /// `𝒟_0 = 𝒟_source, …, 𝒟_r`, with `𝒟_k = μ_{v_k}(𝒟_{k−1})`.
    pub seeds: Vec<Arc<Seed>>,
}

impl FlipPlan {
    pub fn new(lat: &Lattice, e: usize) -> Result<FlipPlan> {
        let stages = lat.flip_mutation_sequence(e)?;
        Self::from_stages(lat, e, stages)
    }

    /// The same plan with the order inside each stage shuffled deterministically.
    pub fn shuffled(lat: &Lattice, e: usize, rng_seed: u64) -> Result<FlipPlan> {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut stages = lat.flip_mutation_sequence(e)?;
        for st in &mut stages {
            st.shuffle(&mut rng);
        }
        Self::from_stages(lat, e, stages)
    }

    fn from_stages(lat: &Lattice, e: usize, stages: Vec<Vec<usize>>) -> Result<FlipPlan> {
        let (target, vertex_map) = lat.flip(e)?;
        let sequence: Vec<usize> = stages.iter().flatten().copied().collect();
        let mut seeds = vec![lat.seed().clone()];
        for &v in &sequence {
            let next = seeds.last().expect("nonempty").mutate(v)?;
            seeds.push(Arc::new(next));
        }
        Ok(FlipPlan {
            edge: e,
            source: lat.clone(),
            target,
            vertex_map,
            stages,
            sequence,
            seeds,
        })
    }

    pub fn n(&self) -> usize {
        self.source.n()
    }

    /// Number of mutations `r`.
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// `map⁻¹`: `inverse[source vertex] = target vertex`.
    fn inverse_map(&self) -> Vec<usize> {
        let mut inv = vec![0; self.vertex_map.len()];
        for (new, &old) in self.vertex_map.iter().enumerate() {
            inv[old] = new;
        }
        inv
    }

    /// Whether `𝒟_r`, renamed through the vertex map, is the flipped triangulation's
    /// seed.
    pub fn final_seed_matches(&self) -> bool {
        let last = self.seeds.last().expect("nonempty").permuted(&self.vertex_map);
        let t = self.target.seed();
        last.two_q_matrix() == t.two_q_matrix() && last.mutable_mask() == t.mutable_mask()
    }

    /// Moves an element over the target lattice's seed onto `𝒟_r`.
    pub fn to_final_seed(&self, p: &TorusElement) -> Result<TorusElement> {
        if p.seed().len() != self.target.len() {
            return Err(Error::SeedMismatch);
        }
        Ok(p.permuted(&self.inverse_map(), self.seeds.last().expect("nonempty").clone()))
    }
}

/// Certificate of one mutation step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    /// `k` in `ν_{v_k}` (1-based).
    pub step: usize,
    pub vertex: String,
    pub m_values: Vec<i64>,
    pub denominator_degree: usize,
    pub divisible: bool,
    pub mutable_balanced: bool,
    pub terms: usize,
}

/// `Θ(P) = ν_{v_1} ∘ ⋯ ∘ ν_{v_r}(P)` for `P` over the target lattice's seed; the result
/// lives over the source lattice's seed.
pub fn theta_apply(plan: &FlipPlan, p: &TorusElement) -> Result<(TorusElement, Vec<StepRecord>)> {
    let n = plan.n();
    let mut cur = plan.to_final_seed(p)?;
    let mut records = Vec::with_capacity(plan.len());
    for k in (1..=plan.len()).rev() {
        let v = plan.sequence[k - 1];
        let target = &plan.seeds[k - 1];
        let name = target.vertices()[v].clone();
        let wrap = |e: Error| Error::StepFailed {
            step: k,
            vertex: name.clone(),
            source: Box::new(e),
        };
        let (next, frac) = mutate_polynomial_recorded(&cur, v, target, n).map_err(wrap)?;
        let mutable_balanced = next.terms().all(|(t, _)| is_mutable_balanced(t, target, n));
        records.push(StepRecord {
            step: k,
            vertex: name,
            m_values: frac.m_values,
            denominator_degree: frac.denominator_degree,
            divisible: true,
            mutable_balanced,
            terms: next.len(),
        });
        cur = next;
    }
    Ok((cur.with_seed(plan.source.seed().clone()), records))
}

/// Number of worker threads: `QTRACE_THREADS` if set, else rayon's default.
pub fn thread_count() -> usize {
    std::env::var("QTRACE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(rayon::current_num_threads)
}

fn run_parallel<T: Send, F: Fn(usize) -> T + Sync + Send>(count: usize, threads: usize, f: F) -> Vec<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| (0..count).into_par_iter().map(f).collect())
}

/// One verified case: `Θ(input) == expected`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseReport {
    pub key: String,
    pub steps: Vec<StepRecord>,
    /// The input over the flipped triangulation (JSON torus element).
    pub input: serde_json::Value,
    pub output: Option<serde_json::Value>,
    pub expected: serde_json::Value,
    pub equal: bool,
    /// Every output term is balanced and has a unit coefficient `±u^k`.
    pub endpoint_ok: bool,
    pub error: Option<String>,
    pub passed: bool,
}

/// Aggregated verification result.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: String,
    pub surface: String,
    pub n: usize,
    /// Flipped edges, in order of the flips.
    pub flips: Vec<usize>,
    pub cases: Vec<CaseReport>,
    pub verdict: bool,
    pub wall_time_ms: u128,
}

impl VerificationReport {
    fn assemble(kind: &str, surface: &str, n: usize, flips: Vec<usize>, mut cases: Vec<CaseReport>, start: Instant) -> Self {
        cases.sort_by(|a, b| a.key.cmp(&b.key));
        let verdict = !cases.is_empty() && cases.iter().all(|c| c.passed);
        VerificationReport {
            kind: kind.into(),
            surface: surface.into(),
            n,
            flips,
            cases,
            verdict,
            wall_time_ms: start.elapsed().as_millis(),
        }
    }

    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.passed).count()
    }
}

/// A chain of flips starting from one lattice.
#[derive(Clone, Debug)]
pub struct FlipChain {
    pub plans: Vec<FlipPlan>,
}

impl FlipChain {
    pub fn new(start: &Lattice, flips: &[usize]) -> Result<FlipChain> {
        let mut plans: Vec<FlipPlan> = Vec::with_capacity(flips.len());
        let mut cur = start.clone();
        for &e in flips {
            let plan = FlipPlan::new(&cur, e)?;
            cur = plan.target.clone();
            plans.push(plan);
        }
        Ok(FlipChain { plans })
    }

    pub fn start(&self) -> Option<&Lattice> {
        self.plans.first().map(|p| &p.source)
    }

    pub fn end(&self) -> Option<&Lattice> {
        self.plans.last().map(|p| &p.target)
    }

    /// The composite `Θ_{λ₀λ₁} ∘ ⋯ ∘ Θ_{λ_{k−1}λ_k}` applied to `P` over `λ_k`.
    pub fn apply(&self, p: &TorusElement) -> Result<(TorusElement, Vec<StepRecord>)> {
        let mut cur = p.clone();
        let mut all = Vec::new();
        for plan in self.plans.iter().rev() {
            let (next, rec) = theta_apply(plan, &cur)?;
            all.extend(rec);
            cur = next;
        }
        Ok((cur, all))
    }
}

/// Runs one case: applies `apply` to `input` and compares with `expected`.
fn run_case(
    key: String,
    input: &TorusElement,
    expected: &TorusElement,
    endpoint: &Lattice,
    apply: impl Fn(&TorusElement) -> Result<(TorusElement, Vec<StepRecord>)>,
) -> CaseReport {
    let mut report = CaseReport {
        key,
        steps: Vec::new(),
        input: input.to_json(),
        output: None,
        expected: expected.to_json(),
        equal: false,
        endpoint_ok: false,
        error: None,
        passed: false,
    };
    match apply(input) {
        Ok((out, steps)) => {
            report.equal = &out == expected;
            report.endpoint_ok = out.has_unit_coefficients() && out.terms().all(|(t, _)| is_balanced(t, endpoint));
            report.passed = report.equal
                && report.endpoint_ok
                && steps.iter().all(|s| s.divisible && s.mutable_balanced);
            report.output = Some(out.to_json());
            report.steps = steps;
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}

/// The single internal edge of a triangulated square.
fn square_diagonal(lat: &Lattice) -> Result<usize> {
    let s = lat.surface();
    let internal: Vec<usize> = (0..s.edges().len()).filter(|&e| !s.edges()[e].boundary).collect();
    match internal.as_slice() {
        [e] if s.num_marked() == 4 => Ok(*e),
        _ => Err(Error::InvalidInput("expected a triangulated square".into())),
    }
}

/// Naturality on a triangulated square: for each named arc and every `i ≥ j`,
/// `Θ(tr_{λ′}(a_{ij})) = tr_λ(a_{ij})`, where `λ` is `lat` and `λ′` its flip. Also
/// runs `Θ(Z^{𝐤′}) = Z^{𝐤}` on each arc's normalizer.
pub fn verify_naturality(lat: &Lattice, arcs: &[char], threads: usize) -> Result<VerificationReport> {
    verify_naturality_with_plan(lat, arcs, threads, None)
}

/// As [`verify_naturality`], optionally with the stage order shuffled by `shuffle_seed`.
pub fn verify_naturality_with_plan(
    lat: &Lattice,
    arcs: &[char],
    threads: usize,
    shuffle_seed: Option<u64>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let e = square_diagonal(lat)?;
    let plan = match shuffle_seed {
        Some(s) => FlipPlan::shuffled(lat, e, s)?,
        None => FlipPlan::new(lat, e)?,
    };
    if !plan.final_seed_matches() {
        return Err(Error::InvalidSeed("mutation sequence does not reach the flipped seed".into()));
    }
    let n = lat.n();
    let mut jobs: Vec<(String, TorusElement, TorusElement)> = Vec::new();
    for &name in arcs {
        let corner = corner_of_name(name)?;
        let arc = CornerArc::at_polygon_corner(lat.surface(), corner, 1, 1)?;
        let arc_t = CornerArc::at_polygon_corner(plan.target.surface(), corner, 1, 1)?;
        let tr = ArcTracer::for_arc(lat, &arc)?;
        let tr_t = ArcTracer::for_arc(&plan.target, &arc_t)?;
        jobs.push((
            format!("{name}:normalizer"),
            TorusElement::monomial(plan.target.seed().clone(), tr_t.normalizer().clone()),
            TorusElement::monomial(lat.seed().clone(), tr.normalizer().clone()),
        ));
        for i in 1..=n {
            for j in 1..=i {
                jobs.push((format!("{name}:{i}{j}"), tr_t.trace(i, j)?, tr.trace(i, j)?));
            }
        }
    }
    let cases = run_parallel(jobs.len(), threads, |idx| {
        let (key, input, expected) = &jobs[idx];
        run_case(key.clone(), input, expected, lat, |p| theta_apply(&plan, p))
    });
    Ok(VerificationReport::assemble("naturality", "P4", n, vec![e], cases, start))
}

/// Consistency along a closed cycle of flips starting at `lat`: the composite of the
/// `Θ`s fixes every corner-arc trace (for the listed arcs) and every normalizer.
pub fn verify_consistency(lat: &Lattice, flips: &[usize], arcs: &[char], threads: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = lat.n();
    let chain = FlipChain::new(lat, flips)?;
    let end = chain.end().cloned().unwrap_or_else(|| lat.clone());
    // map[end vertex] = start vertex
    let map = lat
        .match_vertices(&end)
        .ok_or_else(|| Error::InvalidInput("flip cycle does not return to the start".into()))?;
    let mut inv = vec![0; map.len()];
    for (v_end, &v_start) in map.iter().enumerate() {
        inv[v_start] = v_end;
    }
    let end_seed = end.seed();
    let seeds_agree = end_seed.permuted(&map).two_q_matrix() == lat.seed().two_q_matrix()
        || end_seed.two_q_matrix() == lat.seed().permuted(&inv).two_q_matrix();
    if !seeds_agree {
        return Err(Error::InvalidSeed("flip cycle does not return to the starting seed".into()));
    }
    let mut jobs: Vec<(String, TorusElement, TorusElement)> = Vec::new();
    for &name in arcs {
        let arc = CornerArc::named(lat.surface(), name, 1, 1)?;
        let tr = ArcTracer::for_arc(lat, &arc)?;
        let mut push = |key: String, p: TorusElement| {
            // Input over the end lattice: vertex `v_end` carries the start's `map[v_end]`.
            let moved = p.permuted(&map, end_seed.clone());
            jobs.push((key, moved, p));
        };
        push(format!("{name}:normalizer"), TorusElement::monomial(lat.seed().clone(), tr.normalizer().clone()));
        for i in 1..=n {
            for j in 1..=i {
                push(format!("{name}:{i}{j}"), tr.trace(i, j)?);
            }
        }
    }
    let surface = format!("P{}", lat.surface().num_marked());
    let cases = run_parallel(jobs.len(), threads, |idx| {
        let (key, input, expected) = &jobs[idx];
        run_case(key.clone(), input, expected, lat, |p| {
            if chain.plans.is_empty() {
                Ok((p.with_seed(lat.seed().clone()), Vec::new()))
            } else {
                chain.apply(p)
            }
        })
    });
    Ok(VerificationReport::assemble("consistency", &surface, n, flips.to_vec(), cases, start))
}

/// Re-checks a report: re-runs every case from its recorded input and compares against
/// its recorded expectation. Returns the recomputed verdict.
pub fn recheck_report(report: &VerificationReport, lat: &Lattice, threads: usize) -> Result<bool> {
    let n = lat.n();
    if n != report.n {
        return Err(Error::InvalidInput(format!("report is for n = {}, lattice has n = {n}", report.n)));
    }
    let chain = FlipChain::new(lat, &report.flips)?;
    let end = chain.end().cloned().unwrap_or_else(|| lat.clone());
    let results = run_parallel(report.cases.len(), threads, |idx| -> Result<bool> {
        let case = &report.cases[idx];
        let input = TorusElement::from_json(end.seed().clone(), &case.input)?;
        let expected = TorusElement::from_json(lat.seed().clone(), &case.expected)?;
        let redo = run_case(case.key.clone(), &input, &expected, lat, |p| {
            if chain.plans.is_empty() {
                Ok((p.with_seed(lat.seed().clone()), Vec::new()))
            } else {
                chain.apply(p)
            }
        });
        Ok(redo.passed && redo.steps == case.steps)
    });
    let mut all = !results.is_empty();
    for r in results {
        all &= r?;
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::p4;

    fn plan(n: usize) -> FlipPlan {
        let lat = Lattice::new(&p4(false), n).unwrap();
        let e = lat.surface().edge_by_label("d13").unwrap();
        FlipPlan::new(&lat, e).unwrap()
    }

    #[test]
    fn nu_prime_on_unit_vector() {
        let p = plan(2);
        let k = p.sequence[0];
        let seed = &p.seeds[0];
        let t = ExponentVector::unit(seed.len(), k);
        assert_eq!(nu_prime_exponent(&t, k, seed).unwrap(), t.scaled(-1));
        let frozen = (0..seed.len()).find(|&v| !seed.is_mutable(v)).unwrap();
        assert!(matches!(
            nu_prime_exponent(&t, frozen, seed),
            Err(Error::MutationAtFrozenVertex(_))
        ));
    }

    #[test]
    fn adjoint_multiplicity_of_x_generator_is_zero() {
        let p = plan(3);
        let k = p.sequence[0];
        let seed = &p.seeds[0];
        let t = ExponentVector::unit(seed.len(), k).scaled(3);
        assert_eq!(adjoint_multiplicity(&t, k, seed, 3).unwrap(), 0);
        let bad = ExponentVector::unit(seed.len(), (k + 1) % seed.len());
        let nonzero = seed.two_q(k, (k + 1) % seed.len()) != 0;
        if nonzero {
            assert!(matches!(adjoint_multiplicity(&bad, k, seed, 3), Err(Error::NotMutableBalanced { .. })));
        }
    }

    #[test]
    fn flip_plan_reaches_flipped_seed() {
        for n in 2..=5 {
            let p = plan(n);
            assert_eq!(p.len(), (n * n * n - n) / 6);
            assert!(p.final_seed_matches(), "n = {n}");
        }
    }

    #[test]
    fn theta_fixes_one() {
        let p = plan(3);
        let one = TorusElement::one(p.target.seed().clone());
        let (out, _) = theta_apply(&p, &one).unwrap();
        assert_eq!(out, TorusElement::one(p.source.seed().clone()));
    }

    #[test]
    fn x_generator_mutation_matches_quantum_formula() {
        // ν_k(X′_v) = [X_v X_k^{[Q(v,k)]₊}] · F^q(X_k, Q(k,v)).
        let n = 2;
        let p = plan(n);
        let k = p.sequence[0];
        let target = &p.seeds[0];
        let src = &p.seeds[1];
        let len = target.len();
        for v in 0..len {
            let x = TorusElement::x_generator(src.clone(), v, n);
            let got = mutate_polynomial(&x, k, target, n);
            let q_vk = target.two_q(v, k) / 2;
            let q_kv = target.two_q(k, v) / 2;
            if v == k {
                let expect = TorusElement::monomial(target.clone(), ExponentVector::unit(len, k).scaled(-(n as i64)));
                assert_eq!(got.unwrap(), expect);
                continue;
            }
            if target.two_q(v, k) % 2 != 0 {
                continue;
            }
            let base = &ExponentVector::unit(len, v).scaled(n as i64)
                + &ExponentVector::unit(len, k).scaled(n as i64 * q_vk.max(0));
            let mut expect = TorusElement::monomial(target.clone(), base);
            for r in 1..=q_kv.max(0) {
                let b = TorusElement::binomial(
                    target.clone(),
                    &ExponentVector::unit(len, k).scaled(n as i64),
                    ScalarLaurent::q_pow(n, 2 * r - 1),
                );
                expect = expect.multiply(&b).unwrap();
            }
            if q_kv >= 0 {
                assert_eq!(got.unwrap(), expect, "v = {v}");
            } else {
                assert!(matches!(got, Err(Error::NotDivisible { .. })));
            }
        }
    }

    #[test]
    fn naturality_n2() {
        let lat = Lattice::new(&p4(false), 2).unwrap();
        let rep = verify_naturality(&lat, &['a'], 1).unwrap();
        for c in &rep.cases {
            assert!(c.passed, "{}: {:?}", c.key, c.error);
        }
        assert!(rep.verdict);
    }
}

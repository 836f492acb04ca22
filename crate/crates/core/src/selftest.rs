//! Built-in property suite over tiny profiles: one construction per family,
//! exhaustive verification, decoder round-trips, middle-code checks, bound
//! consistency, and the determinant-identity trials. One line per check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds;
use crate::code::{
    decode_erasures, decode_hierarchical, middle_parity_check, min_distance, sample_pattern,
    verify_mrc, CodeProfile, VerifyOptions,
};
use crate::constructions::{
    construct_general, construct_h1_1, construct_h1_1_h2_1, construct_h1_2_h2_1,
    derive_hdl_from_hl, ConstructedCode,
};
use crate::field::Element;
use crate::matrix::{identities, FMatrix};

#[derive(Debug, Clone)]
pub struct SelfTestLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelfTestReport {
    pub passed: bool,
    pub lines: Vec<SelfTestLine>,
}

fn record(lines: &mut Vec<SelfTestLine>, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => lines.push(SelfTestLine {
            name: name.into(),
            passed: true,
            detail,
        }),
        Err(detail) => lines.push(SelfTestLine {
            name: name.into(),
            passed: false,
            detail,
        }),
    }
}

/// Random codeword via the kernel basis of H.
pub fn random_codeword(h: &FMatrix, rng: &mut impl Rng) -> Vec<Element> {
    let t = h.tower().clone();
    let level = h.level();
    let basis = h.kernel_basis();
    let mut word = vec![t.zero(level); h.cols()];
    for v in &basis {
        let c = t
            .from_index(level, rng.gen_range(0..t.size(level)))
            .expect("index in range");
        for (j, e) in v.iter().enumerate() {
            word[j] = t.add(&word[j], &t.mul(&c, e));
        }
    }
    word
}

/// Erase a random maximal pattern and decode both ways; errors on mismatch.
pub fn decode_roundtrips(
    built: &ConstructedCode,
    rounds: usize,
    seed: u64,
) -> Result<String, String> {
    let pc = &built.code;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 0..rounds {
        let word = random_codeword(&pc.matrix, &mut rng);
        let pat = sample_pattern(&pc.profile, &mut rng);
        let mut received: Vec<Option<Element>> = word.iter().cloned().map(Some).collect();
        for c in pat.erased() {
            received[c] = None;
        }
        let direct = decode_erasures(&pc.matrix, &received)
            .map_err(|e| format!("round {round}: direct decode failed: {e}"))?;
        let fast = decode_hierarchical(&pc.matrix, &pc.profile, &received)
            .map_err(|e| format!("round {round}: hierarchical decode failed: {e}"))?;
        if direct != word {
            return Err(format!("round {round}: direct decode mismatch"));
        }
        if fast != direct {
            return Err(format!("round {round}: fast path differs from global solve"));
        }
    }
    Ok(format!("{rounds} random erase/decode round-trips"))
}

fn check_family(
    lines: &mut Vec<SelfTestLine>,
    name: &str,
    built: Result<ConstructedCode, crate::constructions::ConstructError>,
    jobs: usize,
) -> Option<ConstructedCode> {
    let built = match built {
        Ok(b) => b,
        Err(e) => {
            record(lines, name, Err(format!("construction failed: {e}")));
            return None;
        }
    };
    let opts = VerifyOptions {
        jobs,
        ..Default::default()
    };
    let outcome = match verify_mrc(&built.code.matrix, &built.code.profile, &opts) {
        Ok(r) if r.passed => Ok(format!(
            "n = {}, {} patterns verified",
            built.code.profile.n, r.patterns_checked
        )),
        Ok(r) => Err(format!("verification failed: {:?}", r.failure_witness)),
        Err(e) => Err(format!("verifier error: {e}")),
    };
    record(lines, name, outcome);
    record(
        lines,
        &format!("{name}: decoder"),
        decode_roundtrips(&built, 100, 0xC0DE),
    );
    Some(built)
}

fn check_middles(lines: &mut Vec<SelfTestLine>, name: &str, built: &ConstructedCode, jobs: usize) {
    let pc = &built.code;
    let opts = VerifyOptions {
        jobs,
        ..Default::default()
    };
    let mut outcome: Result<String, String> = Ok(format!("{} middle codes", pc.profile.t1));
    for i in 0..pc.profile.t1 {
        match middle_parity_check(&pc.matrix, &pc.profile, i) {
            Ok((mid, mp)) => match verify_mrc(&mid, &mp, &opts) {
                Ok(r) if r.passed => {}
                Ok(_) => {
                    outcome = Err(format!("middle code {i} is not maximally recoverable"));
                    break;
                }
                Err(e) => {
                    outcome = Err(format!("middle code {i}: {e}"));
                    break;
                }
            },
            Err(e) => {
                outcome = Err(format!("middle code {i} extraction: {e}"));
                break;
            }
        }
    }
    record(lines, &format!("{name}: middle codes"), outcome);
}

fn check_bounds(lines: &mut Vec<SelfTestLine>, name: &str, built: &ConstructedCode) {
    let pc = &built.code;
    let p = &pc.profile;
    let outcome = (|| -> Result<String, String> {
        let d = min_distance(&pc.matrix).map_err(|e| e.to_string())?;
        let hier = bounds::dmin_upper_hier(p.n, p.k, p.r1, p.r2, p.h2 + p.delta + 1, p.delta + 1)
            .map_err(|e| e.to_string())?;
        if (d as i64) > hier {
            return Err(format!("distance {d} exceeds the hierarchical bound {hier}"));
        }
        let lb = bounds::field_size_lb(p);
        let q = pc.matrix.tower().size(pc.bands.local_level);
        if lb.applicable && (q as i64) < lb.value {
            return Err(format!("field size {q} below the lower bound {}", lb.value));
        }
        Ok(format!(
            "distance {d} <= bound {hier}; field-size bound {}",
            if lb.applicable {
                lb.value.to_string()
            } else {
                "inapplicable".into()
            }
        ))
    })();
    record(lines, &format!("{name}: bounds"), outcome);
}

/// Run the whole suite; `jobs` feeds the verifier's worker count.
pub fn run(jobs: usize) -> SelfTestReport {
    let mut lines = Vec::new();

    let p_general = CodeProfile::hl(3, 2, 1, 1, 1, 1).expect("profile");
    if let Some(built) = check_family(&mut lines, "general", construct_general(&p_general), jobs) {
        check_middles(&mut lines, "general", &built, jobs);
        check_bounds(&mut lines, "general", &built);
    }

    let p_h1 = CodeProfile::hl(2, 1, 1, 1, 2, 1).expect("profile");
    if let Some(built) = check_family(&mut lines, "h1eq1", construct_h1_1(&p_h1), jobs) {
        check_middles(&mut lines, "h1eq1", &built, jobs);
        check_bounds(&mut lines, "h1eq1", &built);
    }

    let p_c3 = CodeProfile::hl(2, 1, 1, 1, 1, 1).expect("profile");
    if let Some(built) = check_family(&mut lines, "h11h21", construct_h1_1_h2_1(&p_c3), jobs) {
        check_middles(&mut lines, "h11h21", &built, jobs);
        check_bounds(&mut lines, "h11h21", &built);
        // derived data-local hierarchy: exact distance
        let outcome = (|| -> Result<String, String> {
            let derived = derive_hdl_from_hl(&built.code).map_err(|e| e.to_string())?;
            let dp = &derived.code.profile;
            let d = min_distance(&derived.code.matrix).map_err(|e| e.to_string())?;
            let expected = bounds::dmin_hdl(dp.h1, dp.h2, dp.delta);
            if d != expected {
                return Err(format!("derived distance {d}, formula {expected}"));
            }
            decode_roundtrips(&derived, 50, 0xD0DE)?;
            Ok(format!("derived n = {}, distance {d} exact", dp.n))
        })();
        record(&mut lines, "h11h21: derived data-local", outcome);
    }

    let p_c4 = CodeProfile::hl(2, 2, 1, 2, 1, 1).expect("profile");
    if let Some(built) = check_family(&mut lines, "h12h21", construct_h1_2_h2_1(&p_c4), jobs) {
        check_middles(&mut lines, "h12h21", &built, jobs);
        check_bounds(&mut lines, "h12h21", &built);
    }

    // determinant identities, 20 quick trials each over F_7
    let ident = (|| -> Result<String, String> {
        let t = std::sync::Arc::new(crate::field::FieldTower::prime(7).map_err(|e| e.to_string())?);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut rand_mat = |rows: usize, cols: usize| {
            FMatrix::from_fn(t.clone(), 0, rows, cols, |_, _| {
                t.from_index(0, rng.gen_range(0..7)).unwrap()
            })
            .unwrap()
        };
        for _ in 0..20 {
            let a = 2;
            let h = 2;
            let c: Vec<FMatrix> = (0..h).map(|_| rand_mat(a, a + 1)).collect();
            let d: Vec<FMatrix> = (0..h).map(|_| rand_mat(h, a + 1)).collect();
            let (l, r) = identities::diag_id(&c, &d).map_err(|e| e.to_string())?;
            if !t.eq(&l, &r) {
                return Err("diag identity mismatch".into());
            }
        }
        Ok("20 block-determinant trials".into())
    })();
    record(&mut lines, "determinant identities", ident);

    let passed = lines.iter().all(|l| l.passed);
    SelfTestReport { passed, lines }
}

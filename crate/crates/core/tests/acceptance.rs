//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured evidence. Run with `cargo test --test acceptance`.

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hlmrc::bounds;
use hlmrc::code::{
    enumerate_e_sets, enumerate_mid_patterns, middle_parity_check, min_distance, pattern_count,
    verify_data_local_mrc, verify_local_mrc, verify_mds, verify_mrc, CodeProfile, MdsMode,
    Variant, VerifyOptions,
};
use hlmrc::constructions::{
    check_theorem2, construct_general, construct_h1_1, construct_h1_1_h2_1, construct_h1_2_h2_1,
    derive_hdl_from_hl, CertMethod, ConstructedCode, ParityCheck,
};
use hlmrc::field::{Element, FieldTower};
use hlmrc::kwise::{bch_columns, search_columns, KWiseRequest};
use hlmrc::matrix::{cauchy, identities, FMatrix, IndexedElementSet};
use hlmrc::selftest::decode_roundtrips;

struct Corpus {
    /// h11h21 on the worked example profile [5,3,2,1,1,2].
    example: ConstructedCode,
    /// General-family instances with n <= 16.
    general: Vec<ConstructedCode>,
    /// General-family instance with h1 = 2 for the dependency injection.
    general_h1_2: ConstructedCode,
    /// Single-global-parity family instance.
    h1eq1: ConstructedCode,
    /// Two-global-parity family instance.
    h12h21: ConstructedCode,
    /// HL codes feeding the derivation, and their derived HDL codes.
    derived: Vec<(ConstructedCode, ConstructedCode)>,
}

fn corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let example =
            construct_h1_1_h2_1(&CodeProfile::hl(5, 3, 2, 1, 1, 2).unwrap()).unwrap();
        let general = vec![
            construct_general(&CodeProfile::hl(3, 2, 1, 1, 1, 1).unwrap()).unwrap(),
            construct_general(&CodeProfile::hl(2, 1, 1, 1, 1, 1).unwrap()).unwrap(),
            construct_general(&CodeProfile::hl(2, 1, 1, 1, 0, 1).unwrap()).unwrap(),
        ];
        let general_h1_2 =
            construct_general(&CodeProfile::hl(2, 2, 1, 2, 1, 1).unwrap()).unwrap();
        let h1eq1 = construct_h1_1(&CodeProfile::hl(2, 1, 1, 1, 2, 1).unwrap()).unwrap();
        let h12h21 = construct_h1_2_h2_1(&CodeProfile::hl(2, 2, 1, 2, 1, 1).unwrap()).unwrap();
        let derive_inputs = vec![
            construct_h1_1_h2_1(&CodeProfile::hl(2, 1, 1, 1, 1, 1).unwrap()).unwrap(),
            construct_h1_1_h2_1(&CodeProfile::hl(2, 1, 1, 1, 1, 2).unwrap()).unwrap(),
            construct_h1_1_h2_1(&CodeProfile::hl(5, 3, 1, 1, 1, 1).unwrap()).unwrap(),
        ];
        let derived = derive_inputs
            .into_iter()
            .map(|input| {
                let out = derive_hdl_from_hl(&input.code).unwrap();
                (input, out)
            })
            .collect();
        Corpus {
            example,
            general,
            general_h1_2,
            h1eq1,
            h12h21,
            derived,
        }
    })
}

/// Every verified HL parity check in the corpus.
fn hl_corpus() -> Vec<&'static ParityCheck> {
    let c = corpus();
    let mut out: Vec<&ParityCheck> = vec![&c.example.code, &c.h1eq1.code, &c.h12h21.code];
    out.extend(c.general.iter().map(|b| &b.code));
    out.push(&c.general_h1_2.code);
    out.extend(c.derived.iter().map(|(input, _)| &input.code));
    out
}

#[test]
fn criterion_1_example_reproduction() {
    let built = &corpus().example;
    let pc = &built.code;
    let p = &pc.profile;
    assert_eq!(p.n, 16);
    assert_eq!((p.t1, p.t2, p.n1, p.n2), (2, 2, 8, 4));

    // block structure: two 5-row mid-group bands, one global row
    let band = p.t2 * p.delta + p.h2;
    assert_eq!(band, 5);
    for i in 0..2 {
        for s in 0..2 {
            let (_, b) = pc
                .bands
                .local
                .iter()
                .find(|((bi, bs), _)| *bi == i && *bs == s)
                .unwrap();
            assert_eq!(b.rows, i * 5 + s * 2..i * 5 + (s + 1) * 2);
        }
        let (_, m) = pc.bands.mid.iter().find(|(bi, _)| *bi == i).unwrap();
        assert_eq!(m.rows, i * 5 + 4..(i + 1) * 5);
    }
    assert_eq!(pc.bands.global.as_ref().unwrap().rows, 10..11);
    pc.validate().unwrap();

    let start = Instant::now();
    let report = verify_mrc(&pc.matrix, p, &VerifyOptions::default()).unwrap();
    let elapsed = start.elapsed();
    assert!(report.passed);
    assert_eq!(report.patterns_checked, 124_416);
    assert_eq!(report.patterns_checked as u128, pattern_count(p));
    assert!(
        elapsed.as_secs() < 60,
        "single-threaded exhaustive verification took {elapsed:?}"
    );
    println!(
        "ACCEPTANCE 1 PASS: n=16 example, {} patterns verified exhaustively in {elapsed:?}",
        report.patterns_checked
    );
}

/// All h1-completions of a mid pattern have full erased-column rank.
fn all_completions_pass(pc: &ParityCheck, mid_erased: &[usize]) -> bool {
    let p = &pc.profile;
    let expected = p.parity_rows();
    let remaining: Vec<usize> = (0..p.n).filter(|c| !mid_erased.contains(c)).collect();
    remaining.iter().copied().combinations(p.h1).all(|extra| {
        let mut cols = mid_erased.to_vec();
        cols.extend(extra);
        cols.sort_unstable();
        pc.matrix.rank_of_cols(&cols) == expected
    })
}

#[test]
fn criterion_2_theorem2_equivalence() {
    let c = corpus();
    let mut instances = 0;
    for built in &c.general {
        let pc = &built.code;
        assert!(pc.profile.n <= 16);
        assert_eq!(built.certificate.method, CertMethod::Theorem2Conditions);
        let mut mid_patterns = 0u64;
        for pat in enumerate_mid_patterns(&pc.profile) {
            let algebraic = check_theorem2(pc, &pat).unwrap();
            let rank_side = all_completions_pass(pc, &pat.erased());
            assert_eq!(
                algebraic, rank_side,
                "per-pattern disagreement on {pat:?} (n = {})",
                pc.profile.n
            );
            assert!(algebraic, "constructed instance must satisfy the conditions");
            mid_patterns += 1;
        }
        let report = verify_mrc(&pc.matrix, &pc.profile, &VerifyOptions::default()).unwrap();
        assert!(report.passed);
        assert_eq!(mid_patterns, built.certificate.checks);
        instances += 1;
    }

    // deliberately dependent lambdas: replace the global band by the all-ones
    // Moore layout; every surviving global combination collapses into
    // F_(q^M1), so pairs are dependent and both checkers must fail
    let mut tampered = c.general_h1_2.code.clone();
    let t = tampered.matrix.tower().clone();
    let one = t.one(tampered.matrix.level());
    let g = tampered.bands.global.clone().unwrap();
    for r in g.rows.clone() {
        for j in 0..tampered.matrix.cols() {
            tampered.matrix.set(r, j, one.clone());
        }
    }
    let mut algebraic_all = true;
    let mut per_pattern_agree = true;
    for pat in enumerate_mid_patterns(&tampered.profile) {
        let algebraic = check_theorem2(&tampered, &pat).unwrap();
        let rank_side = all_completions_pass(&tampered, &pat.erased());
        per_pattern_agree &= algebraic == rank_side;
        algebraic_all &= algebraic;
    }
    let report = verify_mrc(&tampered.matrix, &tampered.profile, &VerifyOptions::default()).unwrap();
    assert!(per_pattern_agree, "equivalence must hold on the failing instance too");
    assert!(!algebraic_all, "dependent lambdas must break the conditions");
    assert!(!report.passed, "dependent lambdas must break recoverability");
    assert!(report.failure_witness.is_some());
    println!(
        "ACCEPTANCE 2 PASS: {instances} instances agree per-pattern; dependent-lambda instance fails both checks"
    );
}

#[test]
fn criterion_3_distance_exactness() {
    let c = corpus();
    let mut count = 0;
    for (input, derived) in &c.derived {
        let dp = &derived.code.profile;
        assert_eq!(dp.variant, Variant::Hdl);
        let d = min_distance(&derived.code.matrix).unwrap();
        assert_eq!(
            d,
            bounds::dmin_hdl(dp.h1, dp.h2, dp.delta),
            "derived HDL distance must be h1+h2+delta+1 (profile {dp:?})"
        );
        // middle codes: local MRC distance (input) and data-local (derived)
        let ip = &input.code.profile;
        let (mid_h, mid_p) = middle_parity_check(&input.code.matrix, ip, 0).unwrap();
        assert_eq!(
            min_distance(&mid_h).unwrap(),
            bounds::dmin_local(ip.h2, ip.r2, ip.delta).unwrap(),
            "local MRC middle distance"
        );
        let (mid_h, mid_p2) = middle_parity_check(&derived.code.matrix, dp, 0).unwrap();
        assert_eq!(
            min_distance(&mid_h).unwrap(),
            bounds::dmin_data_local(dp.h2, dp.delta),
            "data-local middle distance"
        );
        let _ = (mid_p, mid_p2);
        count += 1;
    }
    assert!(count >= 3);
    println!("ACCEPTANCE 3 PASS: {count} derived instances have distance exactly h1+h2+delta+1");
}

#[test]
fn criterion_4_middle_code_lemmas() {
    let mut hl_checked = 0;
    let mut hdl_checked = 0;
    for pc in hl_corpus() {
        for i in 0..pc.profile.t1 {
            let (mid, mp) = middle_parity_check(&pc.matrix, &pc.profile, i).unwrap();
            let report = verify_local_mrc(&mid, &mp, &VerifyOptions::default()).unwrap();
            assert!(
                report.passed,
                "HL middle {i} must be a local MRC ({:?})",
                pc.profile
            );
            hl_checked += 1;
        }
    }
    for (_, derived) in &corpus().derived {
        let pc = &derived.code;
        for i in 0..pc.profile.t1 {
            let (mid, mp) = middle_parity_check(&pc.matrix, &pc.profile, i).unwrap();
            let report = verify_data_local_mrc(&mid, &mp, &VerifyOptions::default()).unwrap();
            assert!(
                report.passed,
                "HDL middle {i} must be a data-local MRC ({:?})",
                pc.profile
            );
            hdl_checked += 1;
        }
    }
    println!(
        "ACCEPTANCE 4 PASS: {hl_checked} HL middles are local MRCs, {hdl_checked} HDL middles are data-local MRCs, zero exceptions"
    );
}

#[test]
fn criterion_5_determinant_identities() {
    let fields: Vec<u64> = vec![2, 3, 5, 7, 11, 13];
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let rand_mat = |t: &Arc<FieldTower>, rows: usize, cols: usize, rng: &mut ChaCha8Rng| {
        FMatrix::from_fn(t.clone(), 0, rows, cols, |_, _| {
            t.from_index(0, rng.gen_range(0..t.size(0))).unwrap()
        })
        .unwrap()
    };
    for trial in 0..100 {
        let q = fields[trial % fields.len()];
        let t = Arc::new(FieldTower::prime(q).unwrap());
        let a = rng.gen_range(1..=3usize);
        let h = rng.gen_range(1..=3usize);
        let c: Vec<FMatrix> = (0..h).map(|_| rand_mat(&t, a, a + 1, &mut rng)).collect();
        let d: Vec<FMatrix> = (0..h).map(|_| rand_mat(&t, h, a + 1, &mut rng)).collect();
        let (l, r) = identities::diag_id(&c, &d).unwrap();
        assert!(t.eq(&l, &r), "diag-id trial {trial}");
    }
    for trial in 0..100 {
        let q = fields[trial % fields.len()];
        let t = Arc::new(FieldTower::prime(q).unwrap());
        let a = rng.gen_range(1..=3usize);
        let c1 = rand_mat(&t, a, a + 1, &mut rng);
        let c2 = rand_mat(&t, a, a + 2, &mut rng);
        let d1 = rand_mat(&t, 3, a + 1, &mut rng);
        let d2 = rand_mat(&t, 3, a + 2, &mut rng);
        let (l, r) = identities::two_prod_id(&c1, &c2, &d1, &d2).unwrap();
        assert!(t.eq(&l, &r), "2prod-id trial {trial}");
    }
    for trial in 0..100 {
        let q = fields[trial % fields.len()];
        let t = Arc::new(FieldTower::prime(q).unwrap());
        let a = rng.gen_range(1..=3usize);
        let c1 = rand_mat(&t, a, a + 1, &mut rng);
        let c2 = rand_mat(&t, a, a + 1, &mut rng);
        let c3 = rand_mat(&t, a, a + 2, &mut rng);
        let mut d1 = rand_mat(&t, 4, a + 1, &mut rng);
        let mut d2 = rand_mat(&t, 4, a + 1, &mut rng);
        let mut d3 = rand_mat(&t, 4, a + 2, &mut rng);
        for j in 0..a + 2 {
            d3.set(0, j, t.zero(0));
        }
        for j in 0..a + 1 {
            d1.set(1, j, t.zero(0));
            d2.set(1, j, t.zero(0));
        }
        let (l, r) = identities::three_prod_id(&[c1, c2, c3], &[d1, d2, d3]).unwrap();
        assert!(t.eq(&l, &r), "3prod-id trial {trial}");
    }
    // Cauchy nonsingularity on random distinct-node instances
    let t = Arc::new(FieldTower::prime(13).unwrap());
    for _ in 0..100 {
        let n = rng.gen_range(1..=4usize);
        let mut pool: Vec<u64> = (0..13).collect();
        for i in (1..pool.len()).rev() {
            pool.swap(i, rng.gen_range(0..=i));
        }
        let a: Vec<Element> = pool[..n].iter().map(|&v| t.scalar(v)).collect();
        let b: Vec<Element> = pool[n..2 * n].iter().map(|&v| t.scalar(v)).collect();
        let det = cauchy(&t, 0, &a, &b).unwrap().det().unwrap();
        assert!(!t.is_zero(&det));
        let formula = identities::cauchy_det_closed_form(&t, 0, &a, &b).unwrap();
        assert!(t.eq(&det, &formula));
    }
    println!("ACCEPTANCE 5 PASS: diag-id, 2prod-id, 3prod-id each pass 100 exact trials; Cauchy determinants nonsingular");
}

#[test]
fn criterion_6_constructions_2_and_4() {
    let c = corpus();
    // family with one global parity
    let b2 = &c.h1eq1;
    assert_eq!(b2.certificate.method, CertMethod::ExhaustiveRank);
    assert_eq!(
        b2.certificate.checks as u128,
        pattern_count(&b2.code.profile)
    );
    // family with two global parities: search reproduces a valid assignment
    let b4 = &c.h12h21;
    let p4 = &b4.code.profile;
    assert_eq!(b4.certificate.method, CertMethod::ExhaustiveRank);
    assert_eq!(b4.certificate.checks as u128, pattern_count(p4));
    let q0 = b4.code.matrix.tower().size(b4.code.bands.local_level);
    assert!(q0 >= 2 * (p4.n2 + p4.delta) as u128 + 3);
    let note = b4
        .certificate
        .notes
        .iter()
        .find(|n| n.starts_with("q0 = "))
        .expect("assignment note");
    let g_size: u64 = note
        .split("|G| = ")
        .nth(1)
        .and_then(|s| s.split(',').next())
        .and_then(|s| s.trim().parse().ok())
        .expect("group order in note");
    assert!(g_size as usize >= p4.n2 + 2);
    println!(
        "ACCEPTANCE 6 PASS: h1=1 instance verified ({} patterns); h1=2,h2=1 instance verified ({} patterns) with q0 = {q0}, |G| = {g_size}",
        b2.certificate.checks, b4.certificate.checks
    );
}

#[test]
fn criterion_7_bounds_consistency() {
    // hand-computed goldens
    assert_eq!(bounds::dmin_upper_rdelta(20, 8, 4, 2).unwrap(), 12);
    assert_eq!(bounds::dmin_local(2, 2, 1).unwrap(), 5);
    assert_eq!(
        bounds::dmin_upper_hier(16, 5, 3, 2, 4, 3).unwrap(),
        7,
        "hierarchical bound on the n=16 profile"
    );
    let golden = CodeProfile::hl(18, 10, 2, 2, 2, 1).unwrap();
    let r = bounds::field_size_lb(&golden);
    assert!(r.applicable);
    assert_eq!(r.value, 1);

    let mut checked = 0;
    for pc in hl_corpus() {
        let p = &pc.profile;
        let d = min_distance(&pc.matrix).unwrap();
        let hier =
            bounds::dmin_upper_hier(p.n, p.k, p.r1, p.r2, p.h2 + p.delta + 1, p.delta + 1)
                .unwrap();
        assert!(
            (d as i64) <= hier,
            "distance {d} violates the hierarchical upper bound {hier} ({p:?})"
        );
        let lb = bounds::field_size_lb(p);
        if lb.applicable {
            let q = pc.matrix.tower().size(pc.matrix.level());
            assert!(
                q as i64 >= lb.value,
                "field size {q} below the lower bound {} ({p:?})",
                lb.value
            );
        }
        checked += 1;
    }
    for (_, derived) in &corpus().derived {
        let p = &derived.code.profile;
        let d = min_distance(&derived.code.matrix).unwrap();
        let hier =
            bounds::dmin_upper_hier(p.n, p.k, p.r1, p.r2, p.h2 + p.delta + 1, p.delta + 1)
                .unwrap();
        assert!((d as i64) <= hier);
        checked += 1;
    }
    println!("ACCEPTANCE 7 PASS: goldens match; {checked} verified instances satisfy every applicable bound");
}

#[test]
fn criterion_8_decoder_roundtrips() {
    let c = corpus();
    let families: Vec<(&str, &ConstructedCode)> = vec![
        ("general", &c.general[0]),
        ("h1eq1", &c.h1eq1),
        ("h11h21", &c.example),
        ("h12h21", &c.h12h21),
    ];
    for (name, built) in &families {
        decode_roundtrips(built, 100, 0xACCE97).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    println!(
        "ACCEPTANCE 8 PASS: 100 exact decode round-trips per family ({}), hierarchical = global solve",
        families.iter().map(|(n, _)| *n).join(", ")
    );
}

#[test]
fn criterion_9_kwise_generator() {
    let t = Arc::new(FieldTower::prime(2).unwrap());
    // [7,4] Hamming: single cyclotomic coset {1,2,4} -> 3 rows
    let hamming = bch_columns(&t, 0, 7, 2).unwrap();
    assert_eq!(hamming.degree, 3);
    assert!(hamming.set.is_k_wise_independent(2).independent);
    // designed distance 5: cosets {1,2,4} and {3,6,5} -> 6 rows
    let bch5 = bch_columns(&t, 0, 7, 4).unwrap();
    assert_eq!(bch5.degree, 6);
    assert!(bch5.set.is_k_wise_independent(4).independent);
    // search-produced sets pass the checker as well
    let searched = search_columns(
        &t,
        &KWiseRequest {
            base_level: 0,
            count: 5,
            k: 3,
            max_extension_degree: 5,
        },
    )
    .unwrap();
    assert!(searched.set.is_k_wise_independent(3).independent);
    println!(
        "ACCEPTANCE 9 PASS: Hamming rows = 3, designed-distance-5 rows = 6, all generated sets pass the checker"
    );
}

/// Cross-check retained from the definitions: the pattern-rank criterion
/// agrees with literal E-set MDS checking on a desk-scale verified instance.
#[test]
fn e_set_oracle_agreement() {
    let built = &corpus().general[1]; // n = 12
    let pc = &built.code;
    let report = verify_mrc(&pc.matrix, &pc.profile, &VerifyOptions::default()).unwrap();
    let basis = pc.matrix.kernel_basis();
    let gen = FMatrix::from_fn(
        pc.matrix.tower().clone(),
        pc.matrix.level(),
        basis.len(),
        pc.matrix.cols(),
        |i, j| basis[i][j].clone(),
    )
    .unwrap();
    let oracle = enumerate_e_sets(&pc.profile).all(|e| {
        verify_mds(&gen.select_cols(&e), MdsMode::Generator).unwrap()
    });
    assert_eq!(report.passed, oracle);
    assert!(report.passed);
    println!("oracle agreement: pattern-rank criterion matches literal E-set MDS checking");
}

/// The h-wise independence sufficiency direction: sets sized by the paper's
/// requirements always yield passing constructions (already exercised by the
/// corpus); here the Moore/MDS equivalence is spot-checked on corpus alphas.
#[test]
fn corpus_alpha_layouts_are_independent() {
    let c = corpus();
    for built in c.general.iter().chain([&c.general_h1_2, &c.h1eq1]) {
        let pc = &built.code;
        let p = &pc.profile;
        if p.h2 == 0 {
            continue;
        }
        let t = pc.matrix.tower().clone();
        let (_, band) = &pc.bands.mid[0];
        let alphas: Vec<Element> = band
            .cols
            .clone()
            .map(|j| {
                t.project(pc.matrix.get(band.rows.start, j), pc.bands.mid_level)
                    .unwrap()
            })
            .collect();
        let set = IndexedElementSet::new(t.clone(), pc.bands.local_level, alphas).unwrap();
        let k = (p.delta + 1) * p.h2;
        assert!(set.is_k_wise_independent(k).independent);
    }
    println!("corpus alpha layouts meet their independence orders");
}

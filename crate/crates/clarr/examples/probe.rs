use clarr::catalog::{self, CmbId};
use clarr::deform::{beta_arrangement, check_deformation, PathSpec};
use clarr::invariants::{
    plinth_curves, splitting_type_checked, splitting_type_geometric, SplittingType,
};
use clarr::mw::{GenName, MordellWeil};
use clarr::plane::{classify, curve_from_section, PlaneCurve};
use clarr::qtower::{rat, Rat};
use clarr::surface::{ParamClass, Surface, SurfaceParams};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // 1. beta pair (2,4) at integer beta vs beta=3 reference
    let reference = classify(&beta_arrangement(&rat(3, 1), (2, 4)).unwrap()).unwrap();
    for b in [-4i64, -3, -2, -1, 0, 1, 2] {
        let beta = rat(b, 1);
        match beta_arrangement(&beta, (2, 4)) {
            Err(e) => println!("pair24 beta={}: assembly error: {}", b, e),
            Ok(arr) => match classify(&arr) {
                Err(e) => println!("pair24 beta={}: classify error: {}", b, e),
                Ok(c) => println!("pair24 beta={}: iso={}", b, c.isomorphic(&reference)),
            },
        }
    }

    // 2. random split tau: swapped decomposition + checked splitting types
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut jitter = |rng: &mut ChaCha8Rng| -> SurfaceParams {
        let e = |r: &mut ChaCha8Rng| rat(r.gen_range(-2i64..=2), 8);
        SurfaceParams::new(
            Rat::from_integer(0.into()),
            [
                rat(-2, 1) + e(rng),
                rat(-1, 1) + e(rng),
                rat(1, 1) + e(rng),
                rat(2, 1) + e(rng),
            ],
        )
    };
    for trial in 0..3 {
        let params = jitter(&mut rng);
        let s = Surface::new(params.clone()).unwrap();
        let mw = MordellWeil::new(s).unwrap();
        let branch = plinth_curves(&mw).unwrap();
        let pd = mw
            .combine(&[(1, GenName::Chord(1, 3)), (1, GenName::Chord(1, 4))])
            .unwrap();
        let pm = mw
            .combine(&[
                (1, GenName::Chord(1, 3)),
                (1, GenName::Chord(1, 4)),
                (1, GenName::Chord(3, 4)),
            ])
            .unwrap();
        let pm_alt = mw
            .combine(&[
                (1, GenName::Chord(1, 3)),
                (-1, GenName::Chord(1, 4)),
                (1, GenName::Chord(3, 4)),
            ])
            .unwrap();
        let d = curve_from_section(&mw, &pd, "D").unwrap();
        let l0 = curve_from_section(&mw, &pm, "L0").unwrap();
        let l0p = curve_from_section(&mw, &pm_alt, "L0'").unwrap();
        let t1 = splitting_type_checked(&branch, &d, &l0, &mw, &pd, &pm);
        let t2 = splitting_type_checked(&branch, &d, &l0p, &mw, &pd, &pm_alt);
        let l34 = curve_from_section(&mw, &mw.generator(GenName::Chord(3, 4)).unwrap(), "L34")
            .unwrap();
        let co = PlaneCurve::graph("Co", Surface::co_graph()).unwrap();
        let lines = match &mw.surface.class {
            ParamClass::SplitConic { lines, .. } => lines.clone(),
            _ => panic!("split expected"),
        };
        let l12 = PlaneCurve::graph("L12", lines[0].clone()).unwrap();
        let branch2 = vec![d.clone(), l0.clone(), l34];
        let ts = splitting_type_geometric(&branch2, &co, &l12);
        println!(
            "trial {}: tau t={:?} t1={:?} t2={:?} swap={:?}",
            trial,
            params.t.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            t1.map(|t| (t.0, t.1)),
            t2.map(|t| (t.0, t.1)),
            ts.map(|t| (t.0, t.1))
        );
        let _ = SplittingType(0, 2);
    }

    // 3. Cmb111 path: random jittered split tau -> canonical, 8 samples
    let entry = catalog::entry(CmbId::C111);
    let golden = catalog::golden(CmbId::C111).unwrap();
    let start = jitter(&mut rng);
    println!(
        "path start t={:?}",
        start.t.iter().map(|r| r.to_string()).collect::<Vec<_>>()
    );
    let spec = PathSpec {
        waypoints: vec![start, entry.params.clone()],
        samples_per_segment: 6,
    };
    let report = check_deformation(&spec, &golden, |params| {
        catalog::assemble(params, &entry.choices).map_err(|e| e.to_string())
    })
    .unwrap();
    println!(
        "cmb111 path: n={} all={} first_failure={:?} collisions={}",
        report.outcomes.len(),
        report.all_isomorphic,
        report.first_failure,
        report.collisions.len()
    );
    for o in &report.outcomes {
        if o.isomorphic != Some(true) {
            println!("  s={} iso={:?} why={:?}", o.s, o.isomorphic, o.degeneracy);
        }
    }
}

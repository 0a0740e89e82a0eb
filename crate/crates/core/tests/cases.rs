mod common;

use common::{rng, suslov_state};
use suslov_core::cases::{
    first_integrals, functional_rank, CaseKind, CaseSpec, Integral, IntegralSet,
};
use suslov_core::integrate::{drift_report, integrate, IntegratorConfig};
use suslov_core::model::{Bivariate, MassTensor, Potential};

fn diag(v: &[f64]) -> MassTensor {
    MassTensor::diagonal(v).unwrap()
}

fn kharlamova(n: usize) -> CaseSpec {
    let mut i = vec![1.0, 1.4, 1.9, 2.3, 2.8][..n - 1].to_vec();
    i.push(0.8);
    let mut b = vec![1.2, -0.8, 1.5, -1.1, 0.9][..n - 1].to_vec();
    b.push(0.0);
    CaseSpec::new(CaseKind::KharlamovaND, diag(&i), Potential::linear(&b), 0.0).unwrap()
}

fn clebsch(n: usize) -> CaseSpec {
    let mut i = vec![1.0, 1.4, 1.9, 2.3, 2.8][..n - 1].to_vec();
    i.push(0.8);
    let mut b = vec![6.0, 5.0, 4.5, 4.0, 3.5][..n - 1].to_vec();
    b.push(1.0);
    CaseSpec::new(
        CaseKind::ClebschTisserandND,
        diag(&i),
        Potential::quadratic(&b),
        0.0,
    )
    .unwrap()
}

#[test]
fn registered_labels() {
    let gyro = CaseSpec::new(
        CaseKind::Gyroscopic3D,
        diag(&[1.0, 2.0, 3.0]),
        Potential::Zero,
        0.5,
    )
    .unwrap();
    assert_eq!(first_integrals(&gyro).unwrap().labels(), ["E"]);
    assert_eq!(
        first_integrals(&kharlamova(4)).unwrap().labels(),
        ["E", "F_1_2", "F_1_3", "F_2_3"]
    );
    assert_eq!(
        first_integrals(&clebsch(4)).unwrap().labels(),
        ["E", "F_1", "F_2", "F_3"]
    );
    let lagrange = CaseSpec::new(
        CaseKind::LagrangeND,
        diag(&[1.5, 1.5, 1.5, 0.8]),
        Potential::linear(&[0.0, 0.0, 0.0, 1.2]),
        0.0,
    )
    .unwrap();
    assert_eq!(
        first_integrals(&lagrange).unwrap().labels(),
        ["E", "L_1_2", "L_1_3", "L_2_3"]
    );
}

#[test]
fn perturbed_integral_drifts() {
    let spec = kharlamova(4);
    let i = spec.mass.diag().unwrap().to_vec();
    let b = spec.linear_b().unwrap().to_vec();
    let k = |j: usize| (i[j] + i[3]) / b[j];
    let (k0, k1) = (k(0), k(1));
    let mut set = IntegralSet::new();
    set.push(Integral::new("exact", "", move |s| {
        k0 * s.omega.get(0, 3) - k1 * s.omega.get(1, 3)
    }));
    set.push(Integral::new("perturbed", "", move |s| {
        1.01 * k0 * s.omega.get(0, 3) - k1 * s.omega.get(1, 3)
    }));
    let field = spec.field().unwrap();
    let s0 = suslov_state(&mut rng(3), 4, 0.6);
    let traj = integrate(
        field.as_ref(),
        &s0,
        (0.0, 20.0),
        0.1,
        &IntegratorConfig::reference(),
    )
    .unwrap();
    let report = drift_report(&traj, &set);
    assert!(report[0].relative_drift < 1e-8);
    assert!(report[1].relative_drift > 1e-4, "{report:?}");
}

#[test]
fn clebsch_integrals_are_independent() {
    for n in 3..=6 {
        let set = first_integrals(&clebsch(n)).unwrap().filter(|l| l != "E");
        for seed in 0..5 {
            let s = suslov_state(&mut rng(100 * n as u64 + seed), n, 0.8);
            assert_eq!(functional_rank(&set, &s, 1e-5).unwrap(), n - 1, "n = {n}");
        }
    }
}

#[test]
fn kharlamova_integrals_satisfy_linear_relations() {
    let spec = kharlamova(4);
    let all = first_integrals(&spec).unwrap();
    let f = all.filter(|l| l.starts_with('F'));
    let s = suslov_state(&mut rng(11), 4, 0.8);
    assert_eq!(f.len(), 3);
    assert_eq!(functional_rank(&f, &s, 1e-5).unwrap(), 2);
    assert_eq!(functional_rank(&all, &s, 1e-5).unwrap(), 3);
}

#[test]
fn dgj_integral_is_independent_of_energy() {
    let spec = CaseSpec::new(
        CaseKind::DGJ3D,
        diag(&[1.0, 2.0, 3.0]),
        Potential::dgj(
            Bivariate::Sin {
                amp: 1.0,
                q_coef: 0.25,
            },
            Bivariate::Quadratic {
                pp: 0.5,
                q: 0.3,
                qq: -0.2,
            },
        )
        .unwrap(),
        0.0,
    )
    .unwrap();
    let set = first_integrals(&spec).unwrap();
    let s = suslov_state(&mut rng(12), 3, 0.8);
    assert_eq!(functional_rank(&set, &s, 1e-5).unwrap(), 2);
}

#[test]
fn gyroscopic_energy_is_conserved() {
    let spec = CaseSpec::new(
        CaseKind::Gyroscopic3D,
        diag(&[1.0, 2.0, 3.0]),
        Potential::linear(&[0.5, -0.2, 0.3]),
        0.7,
    )
    .unwrap();
    let field = spec.field().unwrap();
    let s0 = suslov_state(&mut rng(13), 3, 0.8);
    let traj = integrate(
        field.as_ref(),
        &s0,
        (0.0, 100.0),
        0.5,
        &IntegratorConfig::reference(),
    )
    .unwrap();
    let report = drift_report(&traj, &first_integrals(&spec).unwrap());
    assert!(report[0].relative_drift < 1e-8, "{report:?}");
}

#[test]
fn hypotheses_are_checked() {
    let bad = [
        (
            CaseKind::Lagrange3D,
            diag(&[2.0, 1.5, 1.0]),
            Potential::linear(&[0.0, 0.0, 1.0]),
            0.0,
        ),
        (
            CaseKind::Kharlamova3D,
            diag(&[1.0, 2.0, 3.0]),
            Potential::linear(&[1.0, 1.0, 1.0]),
            0.0,
        ),
        (
            CaseKind::ClebschTisserand3D,
            diag(&[1.0, 2.0, 3.0]),
            Potential::quadratic(&[1.0, 1.0, 1.0]),
            0.0,
        ),
        (
            CaseKind::DGJ3D,
            diag(&[1.0, 2.0, 3.0]),
            Potential::Zero,
            0.0,
        ),
        (
            CaseKind::KharlamovaND,
            diag(&[1.0, 2.0, 3.0, 4.0]),
            Potential::linear(&[1.0, 0.0, 1.0, 0.0]),
            0.0,
        ),
        (
            CaseKind::LagrangeND,
            diag(&[1.0, 2.0, 1.0, 4.0]),
            Potential::linear(&[0.0, 0.0, 0.0, 1.0]),
            0.0,
        ),
        (
            CaseKind::SuslovFree,
            diag(&[1.0, 2.0, 3.0]),
            Potential::Zero,
            0.3,
        ),
    ];
    for (kind, mass, pot, eps) in bad {
        assert!(
            CaseSpec::new(kind, mass, pot, eps).is_err(),
            "{kind} accepted"
        );
    }
}

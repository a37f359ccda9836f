//! Positive and negative fixtures for the five-item characterization.

use std::f64::consts::PI;
use std::sync::Arc;

use cpd_core::construct::field::ConformalField;
use cpd_core::construct::graph::GraphFunction;
use cpd_core::construct::profile::ProfileCurve;
use cpd_core::construct::surface::cpd_surface_r3;
use cpd_core::construct::warped::WarpedProduct;
use cpd_core::diffgeo::curve::{PlaneCurve, Vec2};
use cpd_core::diffgeo::immersion::ParametricImmersion;
use cpd_core::transnormal::{h_from_b, transnormal_from_distance, BaseCurve, CurveBase, TransnormalSpec};
use cpd_core::verify::{theorem_report, ResidualReport, Status, Subject, VerifyConfig, ITEM_1, ITEM_2, ITEM_3, ITEM_4, ITEM_5};
use nalgebra::{DMatrix, DVector, Vector3};

fn cfg() -> VerifyConfig {
    VerifyConfig { grid: vec![15], level_grid: 61, ..VerifyConfig::default() }
}

fn vertical() -> ConformalField {
    ConformalField::constant(DVector::from_vec(vec![0.0, 0.0, 1.0])).unwrap()
}

fn euclid() -> Arc<WarpedProduct> {
    Arc::new(WarpedProduct::euclidean(3))
}

fn unit_circle() -> PlaneCurve {
    PlaneCurve::circle(Vec2::zeros(), 1.0, (0.0, 2.0 * PI))
}

fn run(subject: Subject) -> ResidualReport {
    theorem_report(&subject, &cfg()).unwrap()
}

fn dump(r: &ResidualReport) -> String {
    r.entries.iter().map(|e| format!("{} {} {:e}", e.name, e.status.label(), e.max)).collect::<Vec<_>>().join("; ")
}

fn assert_positive(r: &ResidualReport) {
    assert!(r.all_pass(), "{}", dump(r));
    assert!(!r.inconsistent());
    assert!(r.entries.iter().any(|e| e.status == Status::Pass));
}

fn assert_negative(r: &ResidualReport) {
    for name in [ITEM_1, ITEM_2, ITEM_4, ITEM_5] {
        let e = r.entry(name).unwrap();
        assert_eq!(e.status, Status::Fail, "{}", dump(r));
        assert!(e.max >= 10.0 * e.tol);
    }
}

fn off_center_sphere() -> ParametricImmersion {
    let c = Vector3::new(0.4, 0.3, 2.5);
    ParametricImmersion::new(euclid(), vec![(0.3, 2.8), (0.0, 2.0 * PI)], move |u| {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        DVector::from_vec(vec![c.x + st * cp, c.y + st * sp, c.z + ct])
    })
}

fn sheared_cylinder() -> ParametricImmersion {
    ParametricImmersion::new(euclid(), vec![(0.0, 2.0 * PI), (-1.0, 1.0)], |u| {
        DVector::from_vec(vec![u[0].cos() + 0.5 * u[1], u[0].sin(), u[1]])
    })
}

#[test]
fn catenoid_is_cpd() {
    let m = cpd_surface_r3(&unit_circle(), &ProfileCurve::catenary((-1.0, 1.0)), Vector3::z()).unwrap();
    assert_positive(&run(Subject::Immersion { m, field: vertical() }));
}

#[test]
fn cylinder_is_cpd_with_item_3_skipped() {
    let beta = ProfileCurve::line(0.0, 0.0, PI / 2.0, (-1.0, 1.0));
    let m = cpd_surface_r3(&unit_circle(), &beta, Vector3::z()).unwrap();
    let r = run(Subject::Immersion { m, field: vertical() });
    assert_positive(&r);
    assert!(matches!(r.entry(ITEM_3).unwrap().status, Status::Skipped(_)));
}

#[test]
fn transnormal_graph_over_circle_is_cpd() {
    let base = BaseCurve::Curve(CurveBase::new(unit_circle(), true, 0.8, false).unwrap());
    let map = h_from_b(|s| s, 1.0, (0.1, 3.0), 257).unwrap();
    let f = transnormal_from_distance(&TransnormalSpec::new(map, base), &[(1.1, 1.5), (-0.3, 0.3)]).unwrap();
    assert_positive(&run(Subject::Graph { f, w: euclid() }));
}

#[test]
fn sphere_is_cpd_for_a_radial_field() {
    let r = run(Subject::Immersion { m: off_center_sphere(), field: ConformalField::radial(DVector::zeros(3)) });
    assert_positive(&r);
}

#[test]
fn perturbed_graph_fails() {
    let f = GraphFunction::new(vec![(-1.0, 1.0), (-1.0, 1.0)], |x| x[0] + 0.1 * x[1] * x[1])
        .with_gradient(|x| DVector::from_vec(vec![1.0, 0.2 * x[1]]))
        .with_hessian(|_| DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 0.2])));
    assert_negative(&run(Subject::Graph { f, w: euclid() }));
}

#[test]
fn sheared_cylinder_fails() {
    assert_negative(&run(Subject::Immersion { m: sheared_cylinder(), field: vertical() }));
}

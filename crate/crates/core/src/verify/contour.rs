//! Flux conservation checks: the harmonic measure of each component through
//! its separating curve, the total flux through far circles, and the
//! winding of `log |grad g|` along each curve.

use crate::error::Result;
use crate::geometry::Point;
use crate::green::{contour_flux, log_grad_flux, normal_log_grad_flux, Contour, GreenField};
use crate::verify::identity::separating_curves;
use crate::verify::report::{Check, VerificationReport};

/// Trace one separating curve per component and compare the gradient flux
/// through it with the component's equilibrium mass; the fluxes must sum to
/// one, and the normal flux of `log |grad g|` (the winding of the gradient
/// direction) must be `-1` on every curve.
pub fn check_contour_sum(field: &GreenField) -> Result<VerificationReport> {
    let curves = separating_curves(field)?;
    let mut report = VerificationReport::new("contour_sum");
    report.input("components", format!("{}", curves.len()));

    let mut total = 0.0;
    let mut abs_log_total = 0.0;
    for curve in &curves {
        let j = curve.enclosed[0];
        let id = field.solution().mesh.components[j].id.as_str().to_owned();
        let contour = Contour::from_level_curve(curve);
        let flux = contour_flux(field, &contour)?;
        let mass = field.solution().component_mass(j);
        let winding = normal_log_grad_flux(field, &contour)?;
        let (plus, minus) = log_grad_flux(field, &contour)?;
        total += flux;
        abs_log_total += plus + minus;
        report
            .quantity(format!("{id}.flux"), flux)
            .quantity(format!("{id}.mass"), mass)
            .quantity(format!("{id}.level"), curve.level)
            .quantity(format!("{id}.abs_log_grad_flux"), plus + minus)
            .check(Check::approx(
                format!("{id}.flux_matches_mass"),
                flux,
                mass,
                1e-3,
            ))
            .check(Check::approx(
                format!("{id}.log_grad_winding"),
                winding,
                -1.0,
                1e-2,
            ));
    }
    report
        .quantity("total_flux", total)
        .quantity("abs_log_grad_flux_total", abs_log_total)
        .check(Check::approx("total_flux_is_one", total, 1.0, 1e-3));
    Ok(report)
}

/// Check that the gradient flux through large circles is exactly the total
/// mass (one), and that the far gradient decays like `1/R`: the gradient
/// magnitude at radius `R` must drop by a factor of ten from `100 scale` to
/// `1000 scale`.
pub fn check_flux_normalization(field: &GreenField) -> Result<VerificationReport> {
    let nodes = &field.solution().mesh.nodes;
    let (mut lo, mut hi) = (
        Point::new(f64::INFINITY, f64::INFINITY),
        Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for n in nodes {
        lo = Point::new(lo.x.min(n.position.x), lo.y.min(n.position.y));
        hi = Point::new(hi.x.max(n.position.x), hi.y.max(n.position.y));
    }
    let center = (lo + hi) * 0.5;
    let r1 = 1e2 * field.scale();
    let r2 = 1e3 * field.scale();

    let flux = |radius: f64| {
        contour_flux(field, &Contour::Circle { center, radius })
    };
    let flux1 = flux(r1)?;
    let flux2 = flux(r2)?;
    let probe1 = center + Point::new(r1, 0.0);
    let probe2 = center + Point::new(r2, 0.0);
    let gn1 = field.grad_norm(probe1)?;
    let gn2 = field.grad_norm(probe2)?;
    let decay = gn1 / gn2;
    // the far correction h0 = g - log|z| - robin dies off like 1/|z|
    let h0_1 = field.green_at(probe1)? - probe1.norm().ln() - field.robin();
    let h0_2 = field.green_at(probe2)? - probe2.norm().ln() - field.robin();

    let mut report = VerificationReport::new("flux_normalization");
    report
        .quantity("radius_near", r1)
        .quantity("radius_far", r2)
        .quantity("flux_near", flux1)
        .quantity("flux_far", flux2)
        .quantity("grad_near", gn1)
        .quantity("grad_far", gn2)
        .quantity("decay_ratio", decay)
        .quantity("far_correction_near", h0_1)
        .quantity("far_correction_far", h0_2)
        .check(Check::approx("flux_near_is_one", flux1, 1.0, 1e-6))
        .check(Check::approx("flux_far_is_one", flux2, 1.0, 1e-6))
        .check(Check::approx("gradient_decays_like_1_over_r", decay, 10.0, 0.5));
    if h0_1.abs() > 1e-9 {
        // measurable dipole: it must decay by the radius ratio too
        report.check(Check::approx(
            "far_correction_decays_like_1_over_r",
            h0_1 / h0_2,
            10.0,
            2.0,
        ));
    }
    Ok(report)
}

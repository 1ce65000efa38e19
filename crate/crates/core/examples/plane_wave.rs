//! Sums Gaussian beams launched from a flat source in the default waveguide
//! and compares the result with a geometrical-optics reference.

use gbsum::reference_fields::{go_field, GoConfig};
use gbsum::{field_discrete, plane_wave_bundle, Domain, Medium64, SourceCurve, SuperposConfig64};

fn main() -> gbsum::Result<()> {
    let medium = Medium64::waveguide().with_domain(Domain {
        x: (-8.0, 8.0),
        y: (-1.0, 3.5),
    });
    let xs: Vec<f64> = (0..=40).map(|k| -0.2 + 0.01 * k as f64).collect();
    let mut config = SuperposConfig64::new(200.0, 1.0, 2.0, xs.clone());
    config.s_range = (-4.0, 4.0);

    let bundle = plane_wave_bundle(&medium, &config, &SourceCurve::Flat)?;
    let u = field_discrete(&bundle);

    let go = go_field(
        &medium,
        &SourceCurve::Flat,
        &GoConfig {
            y_star: 2.0,
            fan_spacing: 0.005,
            s_range: (-3.0, 3.0),
            dt: 1e-3,
            receiver_xs: xs,
        },
    )?;
    let reference = go.field(200.0);
    println!("{} beams, max |u - u_GO| = {:.3e}", bundle.beams.len(), u.max_abs_diff(&reference));
    Ok(())
}

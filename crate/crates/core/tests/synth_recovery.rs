use capnet::degree::degree_sequences;
use capnet::powerlaw::{fit_power_law, XminMode};
use capnet::synth::{gen_directed_scale_free, ScaleFreeParams};

// Degrees of the attachment process follow a ratio of gamma functions, which
// behaves like (k + c)^-gamma. A generous fixed cutoff keeps the constant
// small relative to k.
const XMIN: u64 = 40;

#[test]
fn scale_free_exponents_match_prediction() {
    let params = ScaleFreeParams {
        n_edges: 2_000_000,
        p_new_source: 0.37,
        p_new_target: 0.33,
        offset_in: 0.2,
        offset_out: 0.2,
    };
    let (want_in, want_out) = (
        params.predicted_in_exponent(),
        params.predicted_out_exponent(),
    );
    assert!((want_in - 2.7).abs() < 0.01);
    let g = gen_directed_scale_free(params, 11).unwrap();
    assert_eq!(g.edge_count(), 2_000_000);
    let (out_deg, in_deg) = degree_sequences(&g).unwrap();
    let fit_in = fit_power_law(&in_deg, XminMode::Fixed(XMIN)).unwrap();
    let fit_out = fit_power_law(&out_deg, XminMode::Fixed(XMIN)).unwrap();
    assert!(
        (fit_in.gamma - want_in).abs() < 0.1,
        "in {} vs {want_in}",
        fit_in.gamma
    );
    assert!(
        (fit_out.gamma - want_out).abs() < 0.15,
        "out {} vs {want_out}",
        fit_out.gamma
    );
}

#[test]
fn all_new_sources_give_unit_out_degrees() {
    let params = ScaleFreeParams {
        n_edges: 5000,
        p_new_source: 1.0,
        p_new_target: 0.0,
        offset_in: 1.0,
        offset_out: 1.0,
    };
    let g = gen_directed_scale_free(params, 0).unwrap();
    let (out_deg, _) = degree_sequences(&g).unwrap();
    assert!(out_deg.values.iter().all(|&d| d == 1));
}

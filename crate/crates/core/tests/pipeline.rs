use chrono::NaiveDate;
use macrostate_core::{
    compare_markets, macrostate_report, parse_dataset, precinct_points, render, risk_scale,
    ActivityMode, AggregationMode, DateWindow, OutputFormat, ParseOptions, PrecinctAxes,
    Temperature,
};

const SPOT_AND_FUTURES: &str = "symbol,market,date,close,volume
RRC,BVB,2006-01-03,0.10,1000
RRC,BVB,2006-01-04,0.11,1000
RRC,BVB,2006-01-05,0.11,1500
RRC,BVB,2006-02-01,0.50,1
DE_RRC_MAR,BMFMS,2006-01-03,0.125,10
DE_RRC_MAR,BMFMS,2006-01-04,0.125,30
DE_RRC_MAR,BMFMS,2006-01-05,0.125,15
";

fn january() -> DateWindow {
    DateWindow::new(
        NaiveDate::from_ymd_opt(2006, 1, 1),
        NaiveDate::from_ymd_opt(2006, 1, 31),
    )
    .unwrap()
}

#[test]
fn spot_and_futures_over_one_month() {
    let ds = parse_dataset(SPOT_AND_FUTURES, &ParseOptions::default()).unwrap();
    let spot = ds.get("RRC", "BVB").unwrap();
    let fut = ds.get("DE_RRC_MAR", "BMFMS").unwrap();

    let r_spot = macrostate_report(
        spot,
        &january(),
        ActivityMode::default(),
        AggregationMode::Signed,
    )
    .unwrap();
    let r_fut = macrostate_report(
        fut,
        &january(),
        ActivityMode::default(),
        AggregationMode::Signed,
    )
    .unwrap();

    // spot a = [100, 110, 165]: terms 0.1, 0.5
    assert!((r_spot.p_m - 0.3).abs() < 1e-15);
    // futures a = [1.25, 3.75, 1.875]: terms 2, -0.5
    assert!((r_fut.p_m - 0.75).abs() < 1e-15);
    assert_eq!(r_spot.n_valid, 2);

    let cmp = compare_markets(vec![
        ("spot".into(), r_spot.clone()),
        ("march".into(), r_fut.clone()),
    ])
    .unwrap();
    assert_eq!(cmp.window(), january());

    let scale = risk_scale(&[r_spot, r_fut]).unwrap();
    assert_eq!(scale.entries[0].symbol, "DE_RRC_MAR");
    assert!(
        matches!(scale.entries[0].t_b, Temperature::Defined(t) if (t - 4.0 / 3.0).abs() < 1e-15)
    );
    let csv = render(&scale, OutputFormat::Csv);
    assert_eq!(csv.lines().count(), 3);

    let pts = precinct_points(
        spot,
        ActivityMode::default(),
        PrecinctAxes::PriceVolumeVolNorm,
    )
    .unwrap();
    assert_eq!(pts.len(), 3);
}

#[test]
fn rendered_report_is_stable_text() {
    let ds = parse_dataset(SPOT_AND_FUTURES, &ParseOptions::default()).unwrap();
    let r = macrostate_report(
        ds.get("DE_RRC_MAR", "BMFMS").unwrap(),
        &january(),
        ActivityMode::default(),
        AggregationMode::Absolute,
    )
    .unwrap();
    assert_eq!(
        render(&r, OutputFormat::Csv),
        "symbol,market,from,to,activity_mode,aggregation,n_valid,n_skipped,p_m,s_e,ln_w_b,t_b\n\
         DE_RRC_MAR,BMFMS,2006-01-01,2006-01-31,pv,abs,2,0,1.25,1.25,2.5,0.8\n"
    );
}

use pct_impact::report::chart::reference_crosses;
use pct_impact::report::commands::render;
use pct_impact::report::{
    cmd_compare, cmd_robustness, cmd_summary, cmd_topshare, render_ci_chart, AnalysisConfig,
    ChartSeries, CiChartSpec, OutputFormat,
};
use pct_impact::synthetic::{outlier_world, paper_like_dataset};

fn crossing_labels(spec: &CiChartSpec) -> Vec<&str> {
    spec.series
        .iter()
        .filter(|s| reference_crosses(spec, s))
        .map(|s| s.label.as_str())
        .collect()
}

#[test]
fn figure1_reference_crosses_only_institution_1() {
    let d = paper_like_dataset(1).unwrap();
    let out = cmd_summary(&AnalysisConfig::default(), &d).unwrap();
    let (stem, spec) = &out.charts[0];
    assert_eq!(stem, "figure1");
    assert_eq!(spec.reference_line, Some(50.0));
    assert_eq!(crossing_labels(spec), ["1"]);

    // markers carry the exact table values
    let table = &out.tables[0].1;
    for s in &spec.series {
        assert_eq!(Some(s.point), table.value("Mean", &s.label));
        assert_eq!(Some(s.ci_low), table.value("CI low", &s.label));
        assert_eq!(Some(s.ci_high), table.value("CI high", &s.label));
    }
}

#[test]
fn figure2_reference_crosses_only_1_vs_3() {
    let d = paper_like_dataset(1).unwrap();
    let cfg = AnalysisConfig {
        pairs: vec![
            ("1".into(), "2".into()),
            ("1".into(), "3".into()),
            ("3".into(), "2".into()),
        ],
        ..AnalysisConfig::default()
    };
    let out = cmd_compare(&cfg, &d).unwrap();
    let (stem, spec) = &out.charts[0];
    assert_eq!(stem, "figure2");
    assert_eq!(spec.reference_line, Some(0.0));
    assert_eq!(crossing_labels(spec), ["1 vs 3"]);
}

#[test]
fn figure3_is_on_the_percent_scale() {
    let d = paper_like_dataset(1).unwrap();
    let out = cmd_topshare(&AnalysisConfig::default(), &d).unwrap();
    let spec = &out.charts[0].1;
    assert_eq!(spec.scale, 100.0);
    assert_eq!(spec.reference_line, Some(10.0));
    assert!(!crossing_labels(spec).contains(&"2"));
    let svg = render_ci_chart(spec).unwrap();
    assert_eq!(svg.matches(r#"class="series""#).count(), 3);
}

#[test]
fn rendered_svg_is_stable_across_runs() {
    let d = paper_like_dataset(1).unwrap();
    let cfg = AnalysisConfig {
        formats: vec![OutputFormat::Tsv, OutputFormat::Json, OutputFormat::Svg],
        ..AnalysisConfig::default()
    };
    let a = render(&cmd_summary(&cfg, &d).unwrap(), &cfg).unwrap();
    let b = render(&cmd_summary(&cfg, &d).unwrap(), &cfg).unwrap();
    assert_eq!(a, b);
    let names: Vec<&str> = a.iter().map(|x| x.name.as_str()).collect();
    assert!(
        names.contains(&"summary.tsv")
            && names.contains(&"summary.json")
            && names.contains(&"figure1.svg")
    );
}

#[test]
fn zero_width_interval_renders_as_flat_bar() {
    let spec = CiChartSpec {
        title: "single".into(),
        series: vec![ChartSeries {
            label: "A".into(),
            point: 12.0,
            ci_low: 12.0,
            ci_high: 12.0,
        }],
        reference_line: Some(12.0),
        x_label: "x".into(),
        y_label: "y".into(),
        scale: 1.0,
    };
    let svg = render_ci_chart(&spec).unwrap();
    assert!(reference_crosses(&spec, &spec.series[0]));
    let bar = svg
        .lines()
        .find(|l| l.contains(r#"class="error-bar""#))
        .unwrap();
    let attr = |k: &str| {
        bar.split(&format!(r#"{k}=""#))
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap()
            .to_string()
    };
    assert_eq!(attr("y1"), attr("y2"));
}

fn robustness_for_g(outlier: Option<u64>) -> serde_json::Value {
    let d = outlier_world(200, outlier, 4).unwrap();
    let cfg = AnalysisConfig {
        formats: vec![OutputFormat::Json],
        ..AnalysisConfig::default()
    };
    let out = cmd_robustness(&cfg, &d).unwrap();
    let detail = &out
        .json
        .iter()
        .find(|(stem, _)| stem == "robustness_detail")
        .unwrap()
        .1;
    detail
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["institution"] == "G")
        .unwrap()
        .clone()
}

#[test]
fn outlier_moves_mncs_but_not_the_share() {
    let g = robustness_for_g(Some(16_000));
    assert!(g["mncs_relative_delta"].as_f64().unwrap() > 0.4);
    assert!(g["share_delta_points"].as_f64().unwrap().abs() < 2.0);
}

#[test]
fn without_outlier_both_indicators_are_stable() {
    let g = robustness_for_g(None);
    assert!(g["mncs_relative_delta"].as_f64().unwrap() < 0.1);
    assert!(g["share_delta_points"].as_f64().unwrap().abs() < 2.0);
}

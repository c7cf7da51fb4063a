#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_casimirkit");

pub fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Runs `command` on the config text written to a scratch directory, with `--out`.
/// Returns the process output and whether a payload file appeared.
pub fn run_text(command: &str, text: &str) -> (Output, bool) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, text).unwrap();
    let out = dir.path().join("out.dat");
    let o = run(&[command, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    let written = out.exists() || dir.path().join("out.dat.report.json").exists();
    (o, written)
}

pub struct Malformed {
    pub name: &'static str,
    pub command: &'static str,
    pub text: &'static str,
    /// Fragment expected in stderr, usually the offending field path.
    pub mentions: &'static str,
}

pub fn malformed_corpus() -> Vec<Malformed> {
    let m = |name, command, text, mentions| Malformed { name, command, text, mentions };
    vec![
        m("empty file", "force", "", "EOF"),
        m("not json", "cavity", "{ cavities: [", "key must be a string"),
        m("missing distances", "force",
          r#"{"mirror_a":{"substrate":{"preset":"gold-drude"}},"mirror_b":{"substrate":{"preset":"gold-drude"}},"geometry":"plates"}"#,
          "distances_nm"),
        m("unit-suffixed key", "spectral",
          r#"{"mirror_a":{"substrate":{"preset":"gold-drude"}},"mirror_b":{"substrate":{"preset":"gold-drude"}},"separation_m":1e-7,"cutoffs_ev":[0,1],"window_um":[0.3,2.5]}"#,
          "separation_m"),
        m("negative distance", "force",
          r#"{"mirror_a":{"substrate":{"preset":"gold-drude"}},"mirror_b":{"substrate":{"preset":"gold-drude"}},"geometry":"plates","distances_nm":{"start":-10,"stop":100,"points":3}}"#,
          "separation"),
        m("unknown preset", "force",
          r#"{"mirror_a":{"substrate":{"preset":"unobtainium"}},"mirror_b":{"substrate":{"preset":"gold-drude"}},"geometry":"plates","distances_nm":{"start":10,"stop":100,"points":3}}"#,
          "unobtainium"),
        m("string for number", "sensitivity",
          r#"{"theory":{"ideal_sphere_plate":{"radius_um":"100"}},"offset_nm":1,"distances_nm":{"start":50,"stop":100,"points":3}}"#,
          "theory.ideal_sphere_plate.radius_um"),
        m("unknown geometry", "force",
          r#"{"mirror_a":{"substrate":{"preset":"gold-drude"}},"mirror_b":{"substrate":{"preset":"gold-drude"}},"geometry":"cone","distances_nm":{"start":10,"stop":100,"points":3}}"#,
          "geometry"),
        m("zero radius", "sensitivity",
          r#"{"theory":{"ideal_sphere_plate":{"radius_um":0}},"offset_nm":1,"distances_nm":{"start":50,"stop":100,"points":3}}"#,
          "radius"),
        m("curve and monte carlo together", "fit-d0",
          r#"{"theory":{"ideal_sphere_plate":{"radius_um":100}},"curve_csv":"x.csv","monte_carlo":{"runs":2,"true_d0_nm":2000,"extensions_nm":{"start":1700,"stop":1900,"points":5},"sigma_pn":2}}"#,
          "curve_csv"),
        m("neither curve nor monte carlo", "fit-d0",
          r#"{"theory":{"ideal_sphere_plate":{"radius_um":100}}}"#,
          "curve_csv"),
        m("missing curve file", "fit-d0",
          r#"{"theory":{"ideal_sphere_plate":{"radius_um":100}},"curve_csv":"does-not-exist.csv"}"#,
          "does-not-exist.csv"),
        m("threshold above one", "crossover",
          r#"{"theory":{"ideal_sphere_plate":{"radius_um":100}},"offset_nm":1,"threshold":1.5,"resolution":{"distance_nm":62,"force_resolution_pn":3.5}}"#,
          "threshold"),
        m("unsorted cutoffs", "spectral",
          r#"{"mirror_a":{"substrate":{"preset":"gold-drude"}},"mirror_b":{"substrate":{"preset":"gold-drude"}},"separation_nm":100,"cutoffs_ev":[0,2,1],"window_um":[0.3,2.5]}"#,
          "cutoff"),
        m("too few torque angles", "torque",
          r#"{"plate_a":{"preset":"linbo3"},"plate_b":{"preset":"linbo3"},"separation_nm":1000,"disk_radius_mm":10,"angles":3}"#,
          "angles"),
        m("torque plate not a preset", "torque",
          r#"{"plate_a":{"preset":"linbo3"},"plate_b":{"tensor":[1,2,3]},"separation_nm":1000,"disk_radius_mm":10,"angles":8}"#,
          "plate_b"),
        m("extreme aspect ratio", "cavity",
          r#"{"cavities":[{"a1_um":10000,"a2_um":1,"a3_um":1}]}"#,
          "aspect"),
        m("negative cavity side", "cavity",
          r#"{"cavities":[{"a1_um":1,"a2_um":-1,"a3_um":1}]}"#,
          "a2"),
        m("descending depths", "pullout",
          r#"{"a1_um":1,"a2_um":1,"depths_um":{"start":2,"stop":0.3,"points":5},"n_cavities":10}"#,
          "stop must exceed start"),
        m("zero cavities", "pullout",
          r#"{"a1_um":1,"a2_um":1,"depths_um":{"start":0.3,"stop":2,"points":5},"n_cavities":0}"#,
          "n_cavities"),
        m("unknown baseline", "pullout",
          r#"{"a1_um":1,"a2_um":1,"depths_um":{"start":0.3,"stop":2,"points":5},"n_cavities":10,"baseline":{"quadratic":1}}"#,
          "baseline"),
        m("negative noise", "synth",
          r#"{"theory":{"ideal_sphere_plate":{"radius_um":100}},"true_d0_nm":2000,"extensions_nm":{"start":1700,"stop":1900,"points":5},"sigma_pn":-1,"seed":1}"#,
          "sigma"),
        m("empty grid", "sensitivity",
          r#"{"theory":{"ideal_sphere_plate":{"radius_um":100}},"offset_nm":1,"distances_nm":{"start":50,"stop":100,"points":0}}"#,
          "at least one point"),
        m("coating without thickness", "force",
          r#"{"mirror_a":{"substrate":{"preset":"gold-drude"}},"mirror_b":{"substrate":{"preset":"polystyrene"},"coatings":[{"material":{"preset":"palladium-drude"}}]},"geometry":"plates","distances_nm":{"start":10,"stop":100,"points":3}}"#,
          "mirror_b.coatings[0]"),
        m("array instead of object", "shift", "[1, 2, 3]", "line 1 column 2"),
    ]
}

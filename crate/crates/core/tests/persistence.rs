use fksum::data::{load_csv, save_csv, CsvOptions, Dataset};
use fksum::pursuit::{ica_fit, load_json, mdh_fit, ppr_fit, save_json, IcaModel, IcaOptions, MdhModel, MdhOptions, PprModel, PprOptions};
use fksum::simulate::{simulate, SimKind};

#[test]
fn simulated_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sim.csv");
    let sim = simulate(SimKind::SineKink, 500, 1, 11).unwrap();
    save_csv(&path, &sim.data).unwrap();
    let back = load_csv(&path, &CsvOptions::default()).unwrap();
    assert_eq!(back, sim.data);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    save_csv(&a, &simulate(SimKind::Clusters, 300, 4, 9).unwrap().data).unwrap();
    save_csv(&b, &simulate(SimKind::Clusters, 300, 4, 9).unwrap().data).unwrap();
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn models_reload_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let x = simulate(SimKind::Ica, 400, 3, 2).unwrap().data.to_matrix();
    let ica = ica_fit(&x, 3, &IcaOptions { it: 4, ..IcaOptions::default() }).unwrap();
    let p = dir.path().join("ica.json");
    save_json(&p, &ica).unwrap();
    assert_eq!(load_json::<IcaModel>(&p).unwrap(), ica);

    let x = simulate(SimKind::Clusters, 300, 3, 2).unwrap().data.to_matrix();
    let mdh = mdh_fit(&x, &MdhOptions::default()).unwrap();
    let p = dir.path().join("mdh.json");
    save_json(&p, &mdh).unwrap();
    assert_eq!(load_json::<MdhModel>(&p).unwrap(), mdh);

    let sim = simulate(SimKind::Ppr, 200, 3, 2).unwrap();
    let cols: Vec<usize> = (0..3).collect();
    let xs = sim.data.select(&cols);
    let ppr = ppr_fit(&xs, sim.data.column(3), 2, &PprOptions::default()).unwrap();
    let p = dir.path().join("ppr.json");
    save_json(&p, &ppr).unwrap();
    let back: PprModel = load_json(&p).unwrap();
    assert_eq!(back, ppr);
    assert_eq!(fksum::ppr_predict(&back, &xs).unwrap(), fksum::ppr_predict(&ppr, &xs).unwrap());
}

#[test]
fn load_errors_are_descriptive() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "a,b\n1,2\n3,NA\n").unwrap();
    let e = load_csv(&p, &CsvOptions::default()).unwrap_err().to_string();
    assert!(e.contains("row 2") && e.contains("\"b\""), "{e}");
    std::fs::write(&p, "a,b\n").unwrap();
    assert!(load_csv(&p, &CsvOptions::default()).unwrap_err().to_string().contains("no data rows"));
    assert!(load_csv(dir.path().join("missing.csv"), &CsvOptions::default()).is_err());
    let ds = Dataset::new(vec!["a".into()], vec![vec![0.1, 1e-300, -2.5e17]]).unwrap();
    save_csv(&p, &ds).unwrap();
    assert_eq!(load_csv(&p, &CsvOptions::default()).unwrap(), ds);
}

#![allow(dead_code)]

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use socdim::ingest::InteractionRecord;

/// 2015-01-01T00:00:00Z.
pub const T0: i64 = 1_420_070_400;
const YEAR: i64 = 365 * 86_400;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_socdim"))
}

/// Runs the CLI with `SOCDIM_OUT_DIR` unset.
pub fn socdim(out: &Path, args: &[&str]) -> Output {
    bin()
        .env_remove("SOCDIM_OUT_DIR")
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn ok(out: &Path, args: &[&str]) -> Output {
    let o = socdim(out, args);
    assert!(
        o.status.success(),
        "socdim {args:?} failed ({:?}):\n{}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

pub fn write_log(path: &Path, records: &[InteractionRecord]) {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).unwrap());
    for r in records {
        writeln!(w, "{}", r.to_tsv()).unwrap();
    }
    w.flush().unwrap();
}

/// Communities of the partisan corpus: `democrats` and `Conservative` anchor the
/// two sides, `left*` / `right*` fill them out, `hobby*` are apolitical.
pub struct PartisanCorpus {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub hobbies: Vec<String>,
    pub records: Vec<InteractionRecord>,
}

/// Users lean left, right, or neither; partisan users post `political` of their
/// comments in political communities, `loyalty` of those on their own side.
/// Every user also posts in three hobby communities.
pub fn partisan_corpus(
    users: usize,
    comments_per_user: usize,
    political: f64,
    loyalty: f64,
    seed: u64,
) -> PartisanCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut left: Vec<String> = vec!["democrats".into()];
    let mut right: Vec<String> = vec!["Conservative".into()];
    left.extend((0..11).map(|i| format!("left{i}")));
    right.extend((0..11).map(|i| format!("right{i}")));
    let hobbies: Vec<String> = (0..30).map(|i| format!("hobby{i}")).collect();
    let mut records = Vec::new();
    for u in 0..users {
        let side = u % 3;
        let name = format!("user{u}");
        let mine: Vec<&String> = (0..3)
            .map(|_| &hobbies[rng.random_range(0..hobbies.len())])
            .collect();
        let start = T0 + rng.random_range(0..2 * YEAR);
        for _ in 0..comments_per_user {
            let ts = start + rng.random_range(0..YEAR);
            let community = if side < 2 && rng.random::<f64>() < political {
                let own = rng.random::<f64>() < loyalty;
                let pool = if (side == 0) == own { &left } else { &right };
                &pool[rng.random_range(0..pool.len())]
            } else {
                mine[rng.random_range(0..3)]
            };
            if rng.random::<f64>() < 0.01 {
                records.push(InteractionRecord::deleted(community.as_str(), ts));
            } else {
                records.push(InteractionRecord::new(
                    name.as_str(),
                    community.as_str(),
                    ts,
                ));
            }
        }
    }
    PartisanCorpus {
        left,
        right,
        hobbies,
        records,
    }
}

/// Users carry a hidden ±1 attribute; community `c` has affinity `theta[c]` in
/// [−1, 1] and attracts a user with weight `base[c] · σ(beta · a · theta[c])`.
pub struct PlantedCorpus {
    pub communities: Vec<String>,
    pub theta: Vec<f64>,
    pub records: Vec<InteractionRecord>,
}

pub fn planted_corpus(
    users: usize,
    communities: usize,
    events: usize,
    beta: f64,
    seed: u64,
) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..communities).map(|i| format!("c{i:03}")).collect();
    let theta: Vec<f64> = (0..communities)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let base: Vec<f64> = (0..communities)
        .map(|_| rng.random_range(0.5..1.5))
        .collect();
    let sigma = |x: f64| 1.0 / (1.0 + (-x).exp());
    let dist = |a: f64| {
        WeightedIndex::new(
            base.iter()
                .zip(&theta)
                .map(|(b, t)| b * sigma(beta * a * t)),
        )
        .unwrap()
    };
    let (neg, pos) = (dist(-1.0), dist(1.0));
    let per_user = events / users;
    let mut records = Vec::with_capacity(events);
    for u in 0..users {
        let name = format!("u{u}");
        let d = if u % 2 == 0 { &neg } else { &pos };
        for _ in 0..per_user {
            let c = d.sample(&mut rng);
            records.push(InteractionRecord::new(name.as_str(), names[c].as_str(), T0));
        }
    }
    PlantedCorpus {
        communities: names,
        theta,
        records,
    }
}

/// Twenty cities each with a paired university. Locals post in their city and
/// hobby communities; students also post in their university and shared
/// campus-life communities.
pub fn campus_corpus(seed: u64) -> (Vec<[String; 4]>, Vec<InteractionRecord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 20;
    let city: Vec<String> = (0..n).map(|i| format!("city{i}")).collect();
    let uni: Vec<String> = (0..n).map(|i| format!("uni{i}")).collect();
    let campus: Vec<String> = (0..5).map(|i| format!("campus{i}")).collect();
    let hobby: Vec<String> = (0..20).map(|i| format!("hobby{i}")).collect();
    let mut records = Vec::new();
    let mut uid = 0;
    for i in 0..n {
        for student in [false, true] {
            for _ in 0..if student { 120 } else { 180 } {
                let name = format!("u{uid}");
                uid += 1;
                for _ in 0..60 {
                    let x: f64 = rng.random();
                    let c = if student {
                        match x {
                            x if x < 0.35 => &uni[i],
                            x if x < 0.6 => &city[i],
                            x if x < 0.85 => &campus[rng.random_range(0..campus.len())],
                            _ => &hobby[rng.random_range(0..hobby.len())],
                        }
                    } else if x < 0.5 {
                        &city[i]
                    } else {
                        &hobby[rng.random_range(0..hobby.len())]
                    };
                    records.push(InteractionRecord::new(name.as_str(), c.as_str(), T0));
                }
            }
        }
    }
    let mut quads = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                quads.push([
                    city[i].clone(),
                    uni[i].clone(),
                    city[j].clone(),
                    uni[j].clone(),
                ]);
            }
        }
    }
    (quads, records)
}

/// Small inputs for the CLI: a partisan log plus analogy, word-usage and
/// external-measure files. Returns the log path.
pub fn write_fixture(dir: &Path) -> std::path::PathBuf {
    let corpus = partisan_corpus(300, 80, 0.6, 0.9, 5);
    let log = dir.join("log.tsv");
    write_log(&log, &corpus.records);
    std::fs::write(
        dir.join("analogies.tsv"),
        "left0\tleft1\tright0\tright1\nleft2\tleft3\tright2\tright3\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("usage.tsv"),
        "word\tcommunity\tcommenter\tcount\nvote\tleft0\tu1\t500\nvote\tright0\tu2\t3\nhike\thobby1\tu3\t7\n",
    )
    .unwrap();
    let mut m = String::from("community_id,value,label\n");
    for (i, c) in corpus.left.iter().enumerate() {
        m.push_str(&format!("{c},{},L\n", -1.0 - i as f64 * 0.1));
    }
    for (i, c) in corpus.right.iter().enumerate() {
        m.push_str(&format!("{c},{},R\n", 1.0 + i as f64 * 0.1));
    }
    std::fs::write(dir.join("measure.csv"), m).unwrap();
    log
}

pub const ANALYSES: [&str; 11] = [
    "subset",
    "bins",
    "selection",
    "monthly",
    "extreme",
    "cohorts",
    "users",
    "decompose",
    "wing",
    "implicit",
    "deleted",
];

/// Every command once, writing into `dir/out` (and a null run in `dir/nullrun`).
pub fn run_pipeline(dir: &Path) -> std::path::PathBuf {
    let log = write_fixture(dir);
    let out = dir.join("out");
    let null = dir.join("nullrun");
    let p = |rel: &str| out.join(rel).display().to_string();
    let d = |rel: &str| dir.join(rel).display().to_string();
    let log = log.display().to_string();
    ok(&out, &["ingest", "--input", &log, "--format", "tsv"]);
    ok(
        &out,
        &[
            "train", "--seed", "3", "--dim", "16", "--epochs", "2", "--text",
        ],
    );
    ok(
        &out,
        &["cluster", "--k", "3", "--label", "politics=democrats"],
    );
    ok(
        &out,
        &[
            "dimension",
            "build",
            "--seed",
            "democrats:Conservative",
            "--name",
            "partisan",
            "--k",
            "5",
        ],
    );
    ok(
        &out,
        &[
            "dimension",
            "score",
            "--dimension",
            &p("dimensions/partisan.json"),
            "--ness",
        ],
    );
    ok(
        &out,
        &[
            "dimension",
            "compare",
            "--a",
            &p("scores/partisan.tsv"),
            "--b",
            &p("scores/partisan-ness.tsv"),
        ],
    );
    for a in ANALYSES {
        ok(&out, &["polarize", a]);
    }
    ok(&out, &["eval-analogies", "--set", &d("analogies.tsv")]);
    ok(
        &out,
        &[
            "word-scores",
            "--usage",
            &d("usage.tsv"),
            "--scores",
            &p("scores/partisan.tsv"),
        ],
    );
    ok(
        &out,
        &[
            "validate",
            "--scores",
            &p("scores/partisan.tsv"),
            "--measure",
            &d("measure.csv"),
            "--label-a",
            "L",
            "--label-b",
            "R",
        ],
    );
    ok(
        &out,
        &[
            "export",
            "--text",
            "--neighbors",
            "3",
            "--scores",
            &p("scores/partisan.tsv"),
            "--clusters",
            &p("clusters.tsv"),
        ],
    );
    ok(
        &out,
        &[
            "null", "shuffle", "--input", &log, "--format", "tsv", "--seed", "5",
        ],
    );
    let n = |rel: &str| null.join(rel).display().to_string();
    ok(
        &null,
        &[
            "ingest",
            "--input",
            &p("null/shuffled.tsv"),
            "--format",
            "tsv",
        ],
    );
    ok(
        &null,
        &["train", "--seed", "3", "--dim", "16", "--epochs", "2"],
    );
    ok(
        &null,
        &[
            "dimension",
            "build",
            "--seed",
            "democrats:Conservative",
            "--name",
            "partisan",
            "--k",
            "5",
        ],
    );
    ok(
        &null,
        &[
            "dimension",
            "score",
            "--dimension",
            &n("dimensions/partisan.json"),
            "--ness",
        ],
    );
    ok(
        &out,
        &[
            "null",
            "bins",
            "--ness",
            &n("scores/partisan-ness.tsv"),
            "--partisan",
            &n("scores/partisan.tsv"),
            "--reference",
            &p("polarize/subset.tsv"),
        ],
    );
    out
}

//! Regenerates the committed fixtures under `fixtures/`.
//!
//! ```text
//! cargo run --example gen_fixtures
//! ```
//!
//! Output is a pure function of the seeds below.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use langscape::langid::{group_corpus, train_profiles};
use langscape::model::{LanguageId, RawLanguageRecord};
use langscape::validate_record;
use langscape::wet::encode_record;

const SEED: u64 = 20240613;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Role {
    Stronghold,
    DigitalEcho,
    FadingVoice,
    InvisibleGiant,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::Stronghold => "stronghold",
            Role::DigitalEcho => "digital_echo",
            Role::FadingVoice => "fading_voice",
            Role::InvisibleGiant => "invisible_giant",
        }
    }
}

/// Vitality band: centre of log10(speakers) and the EGIDS levels drawn from.
#[derive(Clone, Copy)]
struct Band {
    log_speakers: f64,
    egids: &'static [&'static str],
    label: &'static str,
}

const V_LOW: Band = Band {
    log_speakers: 3.0,
    egids: &["6b", "7", "8a"],
    label: "low",
};
const V_EDGE: Band = Band {
    log_speakers: 3.7,
    egids: &["7"],
    label: "edge",
};
const V_MID: Band = Band {
    log_speakers: 5.2,
    egids: &["4", "5"],
    label: "mid",
};
const V_HIGH: Band = Band {
    log_speakers: 7.2,
    egids: &["1", "2", "3"],
    label: "high",
};

/// log10 centres of web pages, wiki articles, ML assets, archive entries.
const D_LOW: [f64; 4] = [2.0, 0.7, 0.3, 1.0];
const D_MID: [f64; 4] = [4.5, 3.0, 1.5, 2.5];
const D_HIGH: [f64; 4] = [6.5, 5.0, 2.7, 3.8];

struct Planted {
    code: String,
    role: Role,
    v_band: Band,
    d_band: &'static str,
    raw: RawLanguageRecord,
    counts: [u64; 4],
}

fn code(i: usize) -> String {
    // qaa, qab, ... from the private-use block
    format!(
        "q{}{}",
        (b'a' + (i / 26) as u8) as char,
        (b'a' + (i % 26) as u8) as char
    )
}

fn name(rng: &mut ChaCha8Rng) -> String {
    const ONSETS: &[&str] = &[
        "b", "d", "k", "l", "m", "n", "r", "s", "t", "v", "z", "sh", "th",
    ];
    const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou"];
    let syllables = rng.random_range(2..=3);
    let mut s = String::new();
    for _ in 0..syllables {
        s.push_str(ONSETS.choose(rng).unwrap());
        s.push_str(NUCLEI.choose(rng).unwrap());
    }
    let mut c = s.chars();
    let first = c.next().unwrap().to_ascii_uppercase();
    std::iter::once(first).chain(c).collect()
}

fn jitter(rng: &mut ChaCha8Rng, centre: f64, spread: f64) -> f64 {
    centre + rng.random_range(-spread..spread)
}

fn location(rng: &mut ChaCha8Rng, region: &str) -> (f64, f64) {
    let (lat, lon) = match region {
        "Africa" => ((-30.0, 30.0), (-15.0, 45.0)),
        "Asia" => ((0.0, 50.0), (60.0, 140.0)),
        "Europe" => ((38.0, 65.0), (-8.0, 40.0)),
        "Americas" => ((-40.0, 55.0), (-120.0, -40.0)),
        _ => ((-25.0, 5.0), (140.0, 175.0)),
    };
    let round4 = |x: f64| (x * 1e4).round() / 1e4;
    (
        round4(rng.random_range(lat.0..lat.1)),
        round4(rng.random_range(lon.0..lon.1)),
    )
}

fn plant_sixty(rng: &mut ChaCha8Rng) -> Vec<Planted> {
    // (role, vitality band, digitality band, how many)
    let plan: [(Role, Band, &str, usize); 8] = [
        (Role::Stronghold, V_MID, "mid", 5),
        (Role::Stronghold, V_MID, "high", 5),
        (Role::Stronghold, V_HIGH, "mid", 5),
        (Role::Stronghold, V_HIGH, "high", 5),
        (Role::DigitalEcho, V_LOW, "mid", 5),
        (Role::DigitalEcho, V_LOW, "high", 5),
        (Role::FadingVoice, V_LOW, "low", 18),
        // the 12 planted Invisible Giants: 5 + 5 in the upper vitality bands,
        // 2 with vitality just above every low-band language
        (Role::InvisibleGiant, V_MID, "low", 5),
    ];
    let mut slots: Vec<(Role, Band, &str)> = Vec::new();
    for (role, band, d, n) in plan {
        slots.extend(std::iter::repeat_n((role, band, d), n));
    }
    slots.extend(std::iter::repeat_n(
        (Role::InvisibleGiant, V_HIGH, "low"),
        5,
    ));
    slots.extend(std::iter::repeat_n(
        (Role::InvisibleGiant, V_EDGE, "low"),
        2,
    ));
    assert_eq!(slots.len(), 60);
    slots.shuffle(rng);

    const REGIONS: [&str; 5] = ["Africa", "Asia", "Europe", "Americas", "Pacific"];
    const COLONIZERS: [&str; 5] = ["GBR", "FRA", "ESP", "PRT", "NLD"];
    const STATUS: [&str; 3] = ["national", "regional", "none"];
    let mut out = Vec::new();
    for (i, (role, v_band, d_band)) in slots.into_iter().enumerate() {
        let code = code(i);
        let log_speakers = match v_band.label {
            "edge" => [3.75, 3.85][out
                .iter()
                .filter(|p: &&Planted| p.v_band.label == "edge")
                .count()],
            _ => jitter(rng, v_band.log_speakers, 0.25),
        };
        let speakers = 10f64.powf(log_speakers).round() as u64;
        let egids = *v_band.egids.choose(rng).unwrap();
        let region = *REGIONS.choose(rng).unwrap();
        let colonized = role == Role::InvisibleGiant || rng.random_bool(0.35);
        let (colonizer, duration) = if colonized {
            (
                COLONIZERS.choose(rng).unwrap().to_string(),
                rng.random_range(5..=35u64) * 10,
            )
        } else {
            (String::new(), 0)
        };
        let status = *STATUS.choose(rng).unwrap();
        let unicode = match d_band {
            "low" => rng.random_bool(0.5),
            _ => rng.random_bool(0.9),
        };
        let (lat, lon) = location(rng, region);
        let centres = match d_band {
            "low" => D_LOW,
            "mid" => D_MID,
            _ => D_HIGH,
        };
        let mut counts = [0u64; 4];
        for (c, centre) in counts.iter_mut().zip(centres) {
            *c = 10f64.powf(jitter(rng, centre, 0.2)).round() as u64;
        }
        let raw = RawLanguageRecord {
            iso639_3: code.clone(),
            name: name(rng),
            speakers_l1: speakers.to_string(),
            egids: egids.to_string(),
            region: region.to_string(),
            colonized: colonized.to_string(),
            colonizer,
            colonial_duration_years: duration.to_string(),
            official_status: status.to_string(),
            unicode_support: unicode.to_string(),
            latitude: lat.to_string(),
            longitude: lon.to_string(),
        };
        validate_record(&raw).expect("generated record is valid");
        out.push(Planted {
            code,
            role,
            v_band,
            d_band,
            raw,
            counts,
        });
    }
    out
}

fn json_counts(entries: impl IntoIterator<Item = (String, u64)>) -> String {
    let map: BTreeMap<String, u64> = entries.into_iter().collect();
    serde_json::to_string_pretty(&map).unwrap() + "\n"
}

fn write(path: &Path, contents: impl AsRef<[u8]>) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, contents).unwrap();
    println!("wrote {}", path.display());
}

fn write_sixty(root: &Path, rng: &mut ChaCha8Rng) {
    let dir = root.join("sixty");
    let langs = plant_sixty(rng);

    let mut w = csv::Writer::from_writer(Vec::new());
    for l in &langs {
        w.serialize(&l.raw).unwrap();
    }
    write(&dir.join("vitality.csv"), w.into_inner().unwrap());

    let mut planted = String::from("iso639_3,planted_category,vitality_band,digitality_band\n");
    for l in &langs {
        writeln!(
            planted,
            "{},{},{},{}",
            l.code,
            l.role.as_str(),
            l.v_band.label,
            l.d_band
        )
        .unwrap();
    }
    write(&dir.join("planted.csv"), planted);

    let source = |k: usize| langs.iter().map(move |l| (l.code.clone(), l.counts[k]));
    write(
        &dir.join("counts/web.json"),
        json_counts(source(0).chain([("und".to_string(), 4821)])),
    );
    write(
        &dir.join("counts/wiki.json"),
        json_counts(source(1).chain([("zzz".to_string(), 17)])),
    );
    // languages with no ML assets are simply absent from the file
    write(
        &dir.join("counts/ml_assets.json"),
        json_counts(source(2).filter(|(_, n)| *n > 0)),
    );
    write(&dir.join("counts/archives.json"), json_counts(source(3)));

    // Training-corpus token counts grow with speaker population and online
    // presence, with multiplicative noise per corpus.
    let mut oscar = Vec::new();
    for (corpus, scale, noise) in [
        ("pile", 2.0, 0.6),
        ("mc4", 3.0, 0.5),
        ("roots", 2.5, 0.7),
        ("oscar", 2.8, 0.5),
    ] {
        let entries: Vec<(String, u64)> = langs
            .iter()
            .map(|l| {
                let log_sp: f64 = l.raw.speakers_l1.parse::<f64>().unwrap().log10();
                let d = match l.d_band {
                    "low" => 0.0,
                    "mid" => 1.0,
                    _ => 2.0,
                };
                let x = scale + 0.7 * (log_sp - 3.0) + d + rng.random_range(-noise..noise);
                (l.code.clone(), 10f64.powf(x).round() as u64)
            })
            .collect();
        if corpus == "oscar" {
            oscar = entries.clone();
        }
        write(
            &dir.join(format!("tokens/{corpus}.json")),
            json_counts(entries),
        );
    }
    // Same token counts with the language codes permuted.
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5eed);
    let mut codes: Vec<String> = oscar.iter().map(|(c, _)| c.clone()).collect();
    codes.shuffle(&mut shuffle_rng);
    write(
        &dir.join("tokens/oscar_shuffled.json"),
        json_counts(codes.into_iter().zip(oscar.iter().map(|(_, n)| *n))),
    );

    write(
        &dir.join("sixty.conf"),
        "\
# 60-language synthetic fixture
vitality = vitality.csv
counts.web = counts/web.json
counts.wiki = counts/wiki.json
counts.ml_assets = counts/ml_assets.json
counts.archives = counts/archives.json
tokens.pile = tokens/pile.json
tokens.mc4 = tokens/mc4.json
tokens.roots = tokens/roots.json
tokens.oscar = tokens/oscar.json
composite = gmm_rank
out = out
",
    );
    write(
        &dir.join("shuffled.conf"),
        "\
# token counts with permuted language codes
vitality = vitality.csv
counts.web = counts/web.json
counts.wiki = counts/wiki.json
counts.ml_assets = counts/ml_assets.json
counts.archives = counts/archives.json
tokens.oscar_shuffled = tokens/oscar_shuffled.json
out = out
",
    );
}

/// A synthetic language: its own letters and syllable shapes.
struct SynthLang {
    code: &'static str,
    onsets: &'static [&'static str],
    nuclei: &'static [&'static str],
    codas: &'static [&'static str],
}

const SYNTH: [SynthLang; 5] = [
    SynthLang {
        code: "qla",
        onsets: &["p", "t", "k", "m", "n"],
        nuclei: &["a", "i", "u"],
        codas: &[""],
    },
    SynthLang {
        code: "qlb",
        onsets: &["r", "l", "s", "v", "z"],
        nuclei: &["e", "o"],
        codas: &["r", "s", "l", ""],
    },
    SynthLang {
        code: "qlc",
        onsets: &["b", "d", "g", "w", "y"],
        nuclei: &["aa", "ee", "oo", "ia"],
        codas: &["", "n"],
    },
    SynthLang {
        code: "qld",
        onsets: &["ħ", "ş", "ç", "ğ", "q"],
        nuclei: &["ı", "a", "ö"],
        codas: &["", "x", "ç"],
    },
    SynthLang {
        code: "qle",
        onsets: &["kh", "sh", "zh", "ch", "f"],
        nuclei: &["ä", "ü", "y"],
        codas: &["", "t", "tt"],
    },
];

fn sentence(lang: &SynthLang, rng: &mut ChaCha8Rng) -> String {
    let words = rng.random_range(6..=12);
    (0..words)
        .map(|_| {
            let syl = rng.random_range(1..=3);
            (0..syl)
                .map(|_| {
                    format!(
                        "{}{}{}",
                        lang.onsets.choose(rng).unwrap(),
                        lang.nuclei.choose(rng).unwrap(),
                        lang.codas.choose(rng).unwrap()
                    )
                })
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_langid(root: &Path, rng: &mut ChaCha8Rng) {
    let dir = root.join("langid");
    let mut train = String::from("# code<TAB>text, synthetic languages qla..qle\n");
    let mut holdout = String::from("# code<TAB>text, disjoint draws from the same generators\n");
    let mut pairs = Vec::new();
    for lang in &SYNTH {
        for _ in 0..120 {
            let s = sentence(lang, rng);
            writeln!(train, "{}\t{}", lang.code, s).unwrap();
            pairs.push((LanguageId::new(lang.code).unwrap(), s));
        }
    }
    for lang in &SYNTH {
        for _ in 0..60 {
            writeln!(holdout, "{}\t{}", lang.code, sentence(lang, rng)).unwrap();
        }
    }
    write(&dir.join("train.tsv"), train);
    write(&dir.join("holdout.tsv"), holdout);
    let model = train_profiles(&group_corpus(pairs)).unwrap();
    write(&dir.join("model.json"), model.to_json() + "\n");
    write(
        &dir.join("count.conf"),
        "\
langid_model = model.json
langid_corpus = train.tsv
wet_dir = ../wet
min_confidence = 0.5
out = out
",
    );
}

fn write_wet(root: &Path, rng: &mut ChaCha8Rng) {
    let a = sentence(&SYNTH[0], rng);
    let b = format!(
        "{} WARC/1.0 {}",
        sentence(&SYNTH[1], rng),
        sentence(&SYNTH[1], rng)
    );
    let c = sentence(&SYNTH[2], rng);
    let mut bytes = Vec::new();
    bytes.extend(encode_record("http://example.org/qla", a.as_bytes()));
    bytes.extend(encode_record("http://example.org/qlb", b.as_bytes()));
    bytes.extend(encode_record("http://example.org/qlc", c.as_bytes()));
    write(&root.join("wet/three.wet"), bytes);
}

fn main() {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    write_sixty(&root, &mut rng);
    write_langid(&root, &mut rng);
    write_wet(&root, &mut rng);
}

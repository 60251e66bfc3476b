//! Seeded generator for the synthetic corpus shipped under `corpus/`.
//!
//! Every subtopic draws one weekly common factor `e`. Demand and each supply
//! source load on it with weight `sqrt(0.35)` plus independent noise, so the
//! expected lag-0 correlation between any supply series and demand is 0.35
//! and no other lag carries signal. Normal subtopics get steady demand and
//! spiky supply; the three [`SUPPLY_HEAVY`] subtopics get the opposite, which
//! makes their cumulative normalized supply exceed demand.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use chrono::{Duration, NaiveDate, NaiveTime};
use infodelta::ingest::gdelt::{fixture_name, request_url, GDELT_DOC_ENDPOINT};
use infodelta::taxonomy::{Subtopic, DEFAULT_TAXONOMY_TOML};
use infodelta::{Taxonomy, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal};

pub const WINDOW: &str = "2022-12-26..2024-08-12";
pub const COUNTRY: &str = "IT";
pub const SEED: u64 = 0x1d_2024;
pub const LOADING_SQ: f64 = 0.35;

/// Subtopics whose cumulative supply is built to exceed demand.
pub const SUPPLY_HEAVY: [&str; 3] = [
    "buildings_energetic_requalification",
    "mobility_cycle_lane",
    "work_green_deal",
];

#[derive(Debug, Clone, Copy)]
struct Level {
    mean: f64,
    sd: f64,
}

struct Profile {
    demand: Level,
    facebook: Level,
    instagram: Level,
    gdelt: Level,
}

const NORMAL: Profile = Profile {
    demand: Level {
        mean: 60.0,
        sd: 10.0,
    },
    facebook: Level { mean: 6.0, sd: 2.5 },
    instagram: Level { mean: 4.0, sd: 1.8 },
    gdelt: Level {
        mean: 40.0,
        sd: 14.0,
    },
};

const HEAVY: Profile = Profile {
    demand: Level {
        mean: 30.0,
        sd: 11.0,
    },
    facebook: Level {
        mean: 18.0,
        sd: 2.0,
    },
    instagram: Level {
        mean: 12.0,
        sd: 1.5,
    },
    gdelt: Level {
        mean: 120.0,
        sd: 10.0,
    },
};

const TEMPLATES: [&str; 6] = [
    "{}: cosa cambia da questa settimana",
    "Nuovo aggiornamento su {} per le famiglie",
    "Il dibattito su {} continua in consiglio comunale",
    "Domande e risposte su {}",
    "{} e il futuro del territorio",
    "Approfondimento del giorno: {}",
];

const UNMATCHED: [&str; 3] = [
    "Buona domenica a tutti dal nostro staff",
    "Seguite la diretta di stasera",
    "Grazie per i vostri messaggi",
];

const FB_ACCOUNTS: usize = 40;
const IG_ACCOUNTS: usize = 30;

struct Post {
    platform: &'static str,
    at: chrono::NaiveDateTime,
    account: String,
    followers: u64,
    engagement: i64,
    text: String,
}

fn window() -> Window {
    WINDOW.parse().expect("valid window")
}

fn counts(rng: &mut ChaCha8Rng, factor: &[f64], level: Level) -> Vec<u64> {
    let rho = LOADING_SQ.sqrt();
    let rest = (1.0 - LOADING_SQ).sqrt();
    factor
        .iter()
        .map(|&e| {
            let noise: f64 = StandardNormal.sample(rng);
            let z = rho * e + rest * noise;
            (level.mean + level.sd * z).round().max(0.0) as u64
        })
        .collect()
}

fn rescale_trends(raw: &[u64]) -> Vec<u64> {
    let max = raw.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return vec![0; raw.len()];
    }
    raw.iter().map(|&v| (200 * v + max) / (2 * max)).collect()
}

fn trends_csv(st: &Subtopic, first: NaiveDate, values: &[u64], italian: bool) -> String {
    let mut out = String::new();
    if italian {
        let _ = writeln!(
            out,
            "Categoria: Tutte le categorie\n\nSettimana,{}: (Italia)",
            st.trends.label()
        );
    } else {
        let _ = writeln!(
            out,
            "Category: All categories\n\nWeek,{}: (Italy)",
            st.trends.label()
        );
    }
    for (i, &v) in values.iter().enumerate() {
        let day = first + Duration::weeks(i as i64);
        if v == 0 {
            let _ = writeln!(out, "{day},<1");
        } else {
            let _ = writeln!(out, "{day},{v}");
        }
    }
    out
}

fn gdelt_json(first: NaiveDate, weekly: &[u64], rng: &mut ChaCha8Rng) -> String {
    let mut data = Vec::new();
    for (i, &w) in weekly.iter().enumerate() {
        let mut days = [0u64; 7];
        for _ in 0..w {
            days[rng.random_range(0..7)] += 1;
        }
        for (d, &v) in days.iter().enumerate() {
            let date = first + Duration::days(7 * i as i64 + d as i64);
            data.push(serde_json::json!({
                "date": format!("{}T000000Z", date.format("%Y%m%d")),
                "value": v,
            }));
        }
    }
    let doc = serde_json::json!({
        "query_details": { "title": "", "date_resolution": "day" },
        "timeline": [{ "series": "Article Count", "data": data }],
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("json");
    text.push('\n');
    text
}

fn timestamp(rng: &mut ChaCha8Rng, week: NaiveDate) -> chrono::NaiveDateTime {
    let secs = rng.random_range(0..7 * 86_400i64);
    week.and_time(NaiveTime::MIN) + Duration::seconds(secs)
}

fn post_text(rng: &mut ChaCha8Rng, taxonomy: &Taxonomy, st: &Subtopic) -> String {
    let phrases = st.post_query.phrases();
    let phrase = phrases[rng.random_range(0..phrases.len())];
    let template = TEMPLATES[rng.random_range(0..TEMPLATES.len())];
    let text = template.replacen("{}", phrase, 1);
    let text = if text.starts_with(phrase) {
        let mut c = text.chars();
        let head: String = c
            .next()
            .map(|h| h.to_uppercase().collect())
            .unwrap_or_default();
        head + c.as_str()
    } else {
        text
    };
    assert_eq!(
        taxonomy.classify_post(&text).map(|s| s.id.as_str()),
        Some(st.id.as_str()),
        "generated text {text:?} must classify to {}",
        st.id
    );
    text
}

fn accounts(rng: &mut ChaCha8Rng, prefix: &str, n: usize) -> Vec<(String, u64)> {
    let followers = LogNormal::<f64>::new(9.0, 1.3).expect("valid lognormal");
    (0..n)
        .map(|i| {
            (
                format!("{prefix}_{:03}", i + 1),
                followers.sample(rng).round() as u64 + 50,
            )
        })
        .collect()
}

fn posts_csv(posts: &[Post]) -> String {
    let mut out =
        String::from("platform,posted_at,account_id,followers_at_post,total_engagement,text\n");
    for p in posts {
        let _ = writeln!(
            out,
            "{},{},{},{},{},\"{}\"",
            p.platform,
            p.at.format("%Y-%m-%dT%H:%M:%SZ"),
            p.account,
            p.followers,
            p.engagement,
            p.text.replace('"', "\"\"")
        );
    }
    out
}

fn run_toml() -> String {
    format!(
        "schema_version = 1\n\
         taxonomy = \"taxonomy.toml\"\n\
         output_dir = \"out\"\n\
         window = \"{WINDOW}\"\n\
         max_lag = 8\n\
         min_episode_len = 1\n\
         sources = [\"facebook\", \"instagram\", \"gdelt\"]\n\
         country = \"{COUNTRY}\"\n\
         \n\
         [inputs]\n\
         posts = \"posts.csv\"\n\
         trends_dir = \"trends\"\n\
         \n\
         [gdelt]\n\
         transport = \"fixture\"\n\
         fixture_dir = \"gdelt\"\n"
    )
}

/// Writes the full corpus into `dir`, replacing `trends/` and `gdelt/`.
pub fn generate(dir: &Path) -> io::Result<()> {
    let taxonomy = Taxonomy::default_bundled();
    let window = window();
    let weeks = window.weeks();
    let mut master = ChaCha8Rng::seed_from_u64(SEED);

    for sub in ["trends", "gdelt"] {
        let d = dir.join(sub);
        if d.exists() {
            fs::remove_dir_all(&d)?;
        }
        fs::create_dir_all(&d)?;
    }
    fs::write(dir.join("taxonomy.toml"), DEFAULT_TAXONOMY_TOML)?;
    fs::write(dir.join("run.toml"), run_toml())?;

    let fb = accounts(&mut master, "fb", FB_ACCOUNTS);
    let ig = accounts(&mut master, "ig", IG_ACCOUNTS);
    let engagement = LogNormal::<f64>::new(4.0, 1.2).expect("valid lognormal");
    let mut posts = Vec::new();

    for (idx, st) in taxonomy.subtopics().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ ((idx as u64 + 1) << 20));
        let profile = if SUPPLY_HEAVY.contains(&st.id.as_str()) {
            &HEAVY
        } else {
            &NORMAL
        };
        let factor: Vec<f64> = (0..weeks)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();

        let demand = rescale_trends(&counts(&mut rng, &factor, profile.demand));
        fs::write(
            dir.join("trends").join(format!("{}.csv", st.id)),
            trends_csv(st, window.start, &demand, idx % 2 == 0),
        )?;

        let news = counts(&mut rng, &factor, profile.gdelt);
        let url = request_url(GDELT_DOC_ENDPOINT, &st.news_query, COUNTRY, &window);
        fs::write(
            dir.join("gdelt").join(fixture_name(&url)),
            gdelt_json(window.start, &news, &mut rng),
        )?;

        for (platform, level, pool) in [
            ("facebook", profile.facebook, &fb),
            ("instagram", profile.instagram, &ig),
        ] {
            let weekly = counts(&mut rng, &factor, level);
            for (w, &n) in weekly.iter().enumerate() {
                let week = window.start + Duration::weeks(w as i64);
                for _ in 0..n {
                    let (account, followers) = &pool[rng.random_range(0..pool.len())];
                    posts.push(Post {
                        platform,
                        at: timestamp(&mut rng, week),
                        account: account.clone(),
                        followers: *followers,
                        engagement: engagement.sample(&mut rng).round() as i64,
                        text: post_text(&mut rng, &taxonomy, st),
                    });
                }
            }
        }
    }

    // Rows the reader must skip or leave unassigned.
    let subtopics: Vec<&Subtopic> = taxonomy.subtopics().collect();
    for i in 0..30 {
        let st = subtopics[i % subtopics.len()];
        let (account, followers) = fb[i % fb.len()].clone();
        let week = match i % 3 {
            0 => window.start - Duration::weeks(1 + i as i64),
            1 => window.end + Duration::weeks(1 + i as i64),
            _ => window.start + Duration::weeks((i * 7 % weeks) as i64),
        };
        let (platform, engagement, text) = match i % 3 {
            2 if i % 2 == 0 => ("facebook", 12, UNMATCHED[i % UNMATCHED.len()].to_string()),
            2 => ("instagram", -5, post_text(&mut master, &taxonomy, st)),
            _ => ("facebook", 40, post_text(&mut master, &taxonomy, st)),
        };
        posts.push(Post {
            platform,
            at: timestamp(&mut master, week),
            account,
            followers,
            engagement,
            text,
        });
    }

    posts.sort_by(|a, b| {
        a.at.cmp(&b.at)
            .then_with(|| a.account.cmp(&b.account))
            .then_with(|| a.text.cmp(&b.text))
    });
    fs::write(dir.join("posts.csv"), posts_csv(&posts))?;
    fs::write(dir.join(".gitignore"), "out/\n")?;
    Ok(())
}

//! Deterministic synthetic datasets.
//!
//! Both generators draw from a ChaCha8 stream seeded with the caller's seed,
//! so the same arguments always produce byte-identical TSV output.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::table::{Column, ColumnTable, Schema, StringPool};

/// Tags assigned to forum questions. The first one is drawn more often than
/// the rest so that filtering on it keeps a sizeable share of the posts.
pub const TAGS: [&str; 6] = ["Java", "Python", "Rust", "SQL", "Go", "Haskell"];

pub const QA_SCHEMA: &str = "PostId:int,Type:str,Tag:str,UserId:int,AnswerId:int";

/// `m` edges with both endpoints uniform in `[0, n)`, in columns `src` and
/// `dst`. Duplicates and self-loops are kept.
pub fn random_edges(n: u64, m: usize, seed: u64) -> Result<ColumnTable> {
    if n == 0 && m > 0 {
        return Err(Error::InvalidArgument("cannot place edges on zero nodes".into()));
    }
    let n = i64::try_from(n).map_err(|_| Error::InvalidArgument(format!("node count {n} too large")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut src = Vec::with_capacity(m);
    let mut dst = Vec::with_capacity(m);
    for _ in 0..m {
        src.push(rng.gen_range(0..n));
        dst.push(rng.gen_range(0..n));
    }
    ColumnTable::from_int_columns([("src", src), ("dst", dst)])
}

/// A question/answer forum with `questions + answers` posts.
///
/// Questions come first with post ids `0..questions`, followed by answers.
/// Every answer belongs to a uniformly chosen question and inherits its
/// tag. A question's `AnswerId` is the post id of its accepted answer (one of
/// its answers at random), or -1 when nobody answered; answers carry -1.
/// Askers are uniform over the user base while answerers are skewed toward
/// low user ids, so a few users hold most accepted answers.
pub fn qa_forum(questions: usize, answers: usize, seed: u64) -> Result<ColumnTable> {
    if answers > 0 && questions == 0 {
        return Err(Error::InvalidArgument("answers need at least one question".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = ((questions + answers) / 4).max(1) as f64;

    let tags: Vec<usize> = (0..questions)
        .map(|_| {
            if rng.gen_bool(0.4) {
                0
            } else {
                rng.gen_range(1..TAGS.len())
            }
        })
        .collect();
    let askers: Vec<i64> = (0..questions).map(|_| rng.gen_range(0..users as i64)).collect();

    let mut by_question: Vec<Vec<i64>> = vec![Vec::new(); questions];
    let mut parent = Vec::with_capacity(answers);
    let mut answerers = Vec::with_capacity(answers);
    for a in 0..answers {
        let q = rng.gen_range(0..questions);
        by_question[q].push((questions + a) as i64);
        parent.push(q);
        let u: f64 = rng.gen();
        answerers.push((users * u * u * u) as i64);
    }
    let accepted: Vec<i64> = by_question
        .iter()
        .map(|posts| posts.choose(&mut rng).copied().unwrap_or(-1))
        .collect();

    let rows = questions + answers;
    let mut pool = StringPool::default();
    let question_code = pool.intern("question");
    let answer_code = pool.intern("answer");
    let tag_codes: Vec<u32> = TAGS.iter().map(|t| pool.intern(t)).collect();

    let post_id: Vec<i64> = (0..rows as i64).collect();
    let mut kind = Vec::with_capacity(rows);
    let mut tag = Vec::with_capacity(rows);
    let mut user = Vec::with_capacity(rows);
    let mut answer_id = Vec::with_capacity(rows);
    for q in 0..questions {
        kind.push(question_code);
        tag.push(tag_codes[tags[q]]);
        user.push(askers[q]);
        answer_id.push(accepted[q]);
    }
    for a in 0..answers {
        kind.push(answer_code);
        tag.push(tag_codes[tags[parent[a]]]);
        user.push(answerers[a]);
        answer_id.push(-1);
    }
    let schema = Schema::parse(QA_SCHEMA)?;
    ColumnTable::from_columns(
        schema,
        vec![
            Column::Int(post_id),
            Column::Str(kind),
            Column::Str(tag),
            Column::Int(user),
            Column::Int(answer_id),
        ],
        pool,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::write_tsv;

    fn bytes(t: &ColumnTable) -> Vec<u8> {
        let mut out = Vec::new();
        write_tsv(t, &mut out).unwrap();
        out
    }

    #[test]
    fn random_edges_contract() {
        let t = random_edges(1000, 5000, 7).unwrap();
        assert_eq!(t.num_rows(), 5000);
        for col in ["src", "dst"] {
            assert!(t.int_column(col).unwrap().iter().all(|&v| (0..1000).contains(&v)));
        }
        assert_eq!(bytes(&t), bytes(&random_edges(1000, 5000, 7).unwrap()));
        assert_ne!(bytes(&t), bytes(&random_edges(1000, 5000, 8).unwrap()));
        assert_eq!(random_edges(0, 0, 1).unwrap().num_rows(), 0);
        assert!(random_edges(0, 1, 1).is_err());
    }

    #[test]
    fn forum_shape() {
        let t = qa_forum(100, 200, 3).unwrap();
        assert_eq!(t.num_rows(), 300);
        assert_eq!(t.schema().to_string(), Schema::parse(QA_SCHEMA).unwrap().to_string());
        assert_eq!(bytes(&t), bytes(&qa_forum(100, 200, 3).unwrap()));

        let kinds = t.str_column("Type").unwrap();
        let tags = t.str_column("Tag").unwrap();
        let answer_ids = t.int_column("AnswerId").unwrap();
        assert_eq!(kinds.iter().filter(|k| **k == "question").count(), 100);
        for q in 0..100 {
            let a = answer_ids[q];
            if a >= 0 {
                let a = a as usize;
                assert_eq!(kinds[a], "answer");
                assert_eq!(tags[a], tags[q]);
            }
        }
        assert!(answer_ids[100..].iter().all(|&a| a == -1));
    }

    #[test]
    fn forum_edge_cases() {
        assert_eq!(qa_forum(0, 0, 1).unwrap().num_rows(), 0);
        let lonely = qa_forum(5, 0, 1).unwrap();
        assert!(lonely.int_column("AnswerId").unwrap().iter().all(|&a| a == -1));
        assert!(qa_forum(0, 3, 1).is_err());
    }
}

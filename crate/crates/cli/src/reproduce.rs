//! End-to-end runs of the bundled examples, checked against golden outputs.

use std::collections::BTreeSet;
use std::fmt::Write;

use clap::ValueEnum;
use picturedef::fillings::{closed_form_gram, distinguish, filling_lower_bound, FillingReport};
use picturedef::germ::parse_germ;
use picturedef::incidence::{
    complete_quadrilateral, constraints_of, enumerate_matrices, enumerate_realizable, random_slopes,
    stream_rng,
};
use picturedef::plumbing::{recognize_sandwiched, trees_isomorphic};
use picturedef::resolution::sandwiched_graph;
use picturedef::{DecoratedGerm, IncidenceMatrix, MBigRule, Rational, Recognition, WeightedTree};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 2;

const SIX_LINES: &str = include_str!("../data/six-lines.germ");
const CUSP_LINE: &str = include_str!("../data/cusp-line.germ");
const FIG1_L53: &str = include_str!("../data/fig1-l53.germ");

const GOLDEN_SIX_LINES: &str = include_str!("../data/golden/six-lines.txt");
const GOLDEN_CUSP_LINE: &str = include_str!("../data/golden/cusp-line.txt");
const GOLDEN_FIG1: &str = include_str!("../data/golden/fig1-graph.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    SixLines,
    CuspLine,
    Fig1Graph,
}

impl Example {
    pub fn name(self) -> &'static str {
        match self {
            Self::SixLines => "six-lines",
            Self::CuspLine => "cusp-line",
            Self::Fig1Graph => "fig1-graph",
        }
    }

    fn golden(self) -> &'static str {
        match self {
            Self::SixLines => GOLDEN_SIX_LINES,
            Self::CuspLine => GOLDEN_CUSP_LINE,
            Self::Fig1Graph => GOLDEN_FIG1,
        }
    }
}

pub fn run(example: Example, rule: MBigRule, seed: u64, samples: usize, check: bool) -> Result<String, CliError> {
    let out = match example {
        Example::SixLines => six_lines(seed, samples)?,
        Example::CuspLine => cusp_line(rule)?,
        Example::Fig1Graph => fig1_graph()?,
    };
    if check {
        compare(example, &out)?;
    }
    Ok(out)
}

fn compare(example: Example, found: &str) -> Result<(), CliError> {
    let expected = example.golden();
    let mut e = expected.lines();
    let mut f = found.lines();
    for line in 1.. {
        match (e.next(), f.next()) {
            (None, None) => return Ok(()),
            (a, b) if a == b => {}
            (a, b) => {
                return Err(CliError::GoldenMismatch {
                    example: example.name().to_owned(),
                    line,
                    expected: a.unwrap_or("<end of output>").to_owned(),
                    found: b.unwrap_or("<end of output>").to_owned(),
                })
            }
        }
    }
    unreachable!()
}

fn bundled(text: &str) -> DecoratedGerm {
    parse_germ(text).expect("bundled germ files are valid")
}

fn indented(out: &mut String, text: &str) {
    for line in text.lines() {
        writeln!(out, "  {line}").unwrap();
    }
}

fn rows_text(m: &[Vec<i64>]) -> String {
    m.iter()
        .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(" ") + "\n")
        .collect()
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Four concurrence triples with every line on exactly two of them.
fn is_quadrilateral_pattern(m: &IncidenceMatrix) -> bool {
    let triples: Vec<BTreeSet<usize>> = m.multi_point_supports().into_iter().filter(|s| s.len() == 3).collect();
    triples.len() == 4 && (0..m.rows()).all(|i| triples.iter().filter(|t| t.contains(&i)).count() == 2)
}

fn six_lines(seed: u64, samples: usize) -> Result<String, CliError> {
    let germ = bundled(SIX_LINES);
    let mut out = String::from("example: six-lines\n");
    writeln!(out, "germ: six concurrent lines, l=5 on each").unwrap();
    writeln!(out, "standard: {}", yes(germ.is_standard(MBigRule::PaperCalibrated))).unwrap();

    let ecl = sandwiched_graph(&germ)?;
    let star = WeightedTree::star(-7, &vec![vec![-2, -2, -2]; 6]);
    writeln!(out, "E(C,l) isomorphic to star with center -7 and six arms (-2,-2,-2): {}", yes(trees_isomorphic(&ecl.tree, &star))).unwrap();
    writeln!(out, "E(C,l) negative definite: {}", yes(ecl.negative_definite)).unwrap();
    match recognize_sandwiched(&ecl.tree, None)? {
        Recognition::Certified(c) => {
            writeln!(out, "sandwiched certificate: {} leaves, replay {}", c.total_additions(), if c.verify(&ecl.tree) { "ok" } else { "failed" }).unwrap()
        }
        Recognition::Unknown { .. } => writeln!(out, "sandwiched certificate: none found").unwrap(),
    }
    writeln!(out, "sphere gram (closed form):").unwrap();
    indented(&mut out, &rows_text(&closed_form_gram(&germ)));

    let cs = constraints_of(&germ);
    let all = enumerate_matrices(&cs);
    writeln!(out, "necessary-condition classes: {}", all.len()).unwrap();

    let generic_slopes = random_slopes(6, &mut stream_rng(seed, 0));
    let generic = enumerate_realizable(&cs, &generic_slopes, samples, seed)?;
    let missing: Vec<&IncidenceMatrix> = all.iter().filter(|m| !generic.contains(m)).collect();
    writeln!(out, "generic slopes: realized classes: {}", generic.len()).unwrap();
    writeln!(
        out,
        "generic slopes: unrealized classes: {} ({} complete-quadrilateral patterns)",
        missing.len(),
        missing.iter().filter(|m| is_quadrilateral_pattern(m)).count()
    )
    .unwrap();

    let quadrangle = [(q(0), q(0)), (q(1), q(3)), (q(3), q(1)), (q(4), q(7))];
    let (slopes, offsets, quad) = complete_quadrilateral(&quadrangle);
    let list = |xs: &[Rational]| xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    writeln!(out, "complete quadrilateral on the quadrangle (0,0) (1,3) (3,1) (4,7)").unwrap();
    writeln!(out, "  slopes: {}", list(&slopes)).unwrap();
    writeln!(out, "  offsets: {}", list(&offsets)).unwrap();
    writeln!(out, "  incidence matrix:").unwrap();
    for line in quad.to_text().lines() {
        writeln!(out, "    {line}").unwrap();
    }
    writeln!(out, "  realized by generic slopes: {}", yes(generic.contains(&quad))).unwrap();

    let special = enumerate_realizable(&cs, &slopes, samples, seed)?;
    let gained = special.iter().filter(|m| !generic.contains(m)).count();
    let lost = generic.iter().filter(|m| !special.contains(m)).count();
    let union_all: BTreeSet<&IncidenceMatrix> = generic.iter().chain(&special).collect();
    writeln!(out, "quadrilateral slopes: realized classes: {}", special.len()).unwrap();
    writeln!(out, "quadrilateral slopes: classes not realized generically: {gained}").unwrap();
    writeln!(out, "quadrilateral slopes: generic classes lost: {lost}").unwrap();
    writeln!(out, "union of generic and quadrilateral-slope classes: {}", union_all.len()).unwrap();

    let bound = filling_lower_bound(&[germ.clone(), germ], &[generic, vec![quad]])?;
    writeln!(out, "realized incidence classes: {bound}").unwrap();
    Ok(out)
}

fn cusp_line(rule: MBigRule) -> Result<String, CliError> {
    let germ = bundled(CUSP_LINE);
    let inv = germ.invariants(rule);
    let tuple = |xs: &[u64]| format!("({})", xs.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
    let mut out = String::from("example: cusp-line\n");
    writeln!(out, "germ: cusp with its tangent line, l={}", tuple(germ.decoration())).unwrap();
    writeln!(out, "delta={} m={} M={} (rule {})", tuple(&inv.delta), tuple(&inv.total_multiplicity), tuple(&inv.embedded_total_multiplicity), inv.rule).unwrap();
    writeln!(out, "C1.C2={}", inv.intersections[0][1]).unwrap();
    writeln!(out, "standard: {}", yes(inv.standard)).unwrap();

    let ecl = sandwiched_graph(&germ)?;
    writeln!(out, "E(C,l):").unwrap();
    indented(&mut out, &ecl.tree.to_text());
    writeln!(out, "E(C,l) negative definite: {}", yes(ecl.negative_definite)).unwrap();

    let ms = enumerate_matrices(&constraints_of(&germ));
    for (k, m) in ms.iter().enumerate() {
        writeln!(out, "matrix {}:", k + 1).unwrap();
        indented(&mut out, &FillingReport::new(&germ, m)?.to_text());
    }
    for a in 0..ms.len() {
        for b in a + 1..ms.len() {
            writeln!(out, "matrices {} and {}: {}", a + 1, b + 1, distinguish(&germ, &ms[a], &ms[b])?).unwrap();
        }
    }
    writeln!(out, "necessary-condition classes: {}", ms.len()).unwrap();
    Ok(out)
}

fn fig1_graph() -> Result<String, CliError> {
    let l53 = bundled(FIG1_L53);
    let l63 = l53.with_decoration(&[6, 3])?;
    let chain = WeightedTree::chain(&[-3, -2, -3]);
    let star = WeightedTree::star(-2, &[vec![-3], vec![-3], vec![-2]]);
    let mut out = String::from("example: fig1-graph\n");
    for (name, germ) in [("(5,3)", &l53), ("(6,3)", &l63)] {
        let ecl = sandwiched_graph(germ)?;
        writeln!(out, "cusp with tangent line, l={name}: E(C,l):").unwrap();
        indented(&mut out, &ecl.tree.to_text());
        writeln!(out, "  isomorphic to chain (-3,-2,-3): {}", yes(trees_isomorphic(&ecl.tree, &chain))).unwrap();
        writeln!(out, "  isomorphic to star with center -2 and arms -3, -3, -2: {}", yes(trees_isomorphic(&ecl.tree, &star))).unwrap();
        writeln!(out, "  negative definite: {}", yes(ecl.negative_definite)).unwrap();
    }
    writeln!(out, "compatibility note: the cyclic quotient with chain (-3,-2,-3) arises from l=(5,3).").unwrap();
    writeln!(out, "compatibility note: l=(6,3) gives the four-vertex star above, not that chain.").unwrap();
    Ok(out)
}

//! Instance and front file formats.
//!
//! Instance files are line oriented, one `key values...` entry per line.
//! Blank lines and `#` comments are ignored. Objective rows are written in
//! their original sense, one `objective` line per objective:
//!
//! ```text
//! kind knapsack
//! n 4
//! p 3
//! sense max max max
//! objective 4 2 3 6
//! objective 5 3 1 8
//! objective 6 4 2 7
//! weights 1 1 1 1
//! capacity 4
//! ```
//!
//! Assignment instances carry `tasks T` instead of weights and capacity (the
//! equality rows are implied). General instances carry `m M` and one
//! `constraint <sense> <rhs> <coeffs...>` line per row, with sense one of
//! `<=`, `>=`, `=`.
//!
//! Front files start with a `sense` line followed by one record per point,
//! values in original sense:
//!
//! ```text
//! sense max max max
//! int 1010 7 6 8
//! frac 1,0.5,1,0 8.5 7.5 10
//! ```
//!
//! `int` records hold a binary solution, `frac` records an LP solution.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    bits_from_str, bits_to_string, to_original, Constraint, Point, Problem, ProblemKind, RowSense,
    Sense, Solution, NUM_OBJECTIVES,
};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_values<T: FromStr>(line: usize, field: &str, values: &[&str]) -> Result<Vec<T>> {
    values
        .iter()
        .map(|v| {
            v.parse()
                .map_err(|_| parse_err(line, format!("field '{field}': invalid value '{v}'")))
        })
        .collect()
}

fn parse_single<T: FromStr>(line: usize, field: &str, values: &[&str]) -> Result<T> {
    match values {
        [v] => parse_values(line, field, &[v]).map(|mut v| v.remove(0)),
        _ => Err(parse_err(
            line,
            format!("field '{field}' expects one value, got {}", values.len()),
        )),
    }
}

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            None
        } else {
            Some((i + 1, content.split_whitespace().collect()))
        }
    })
}

pub fn parse_instance(text: &str) -> Result<Problem> {
    let mut kind: Option<String> = None;
    let mut n: Option<usize> = None;
    let mut p: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut tasks: Option<usize> = None;
    let mut senses: Option<Vec<Sense>> = None;
    let mut objectives: Vec<Vec<i64>> = Vec::new();
    let mut weights: Option<Vec<i64>> = None;
    let mut capacity: Option<i64> = None;
    let mut constraints: Vec<Constraint> = Vec::new();
    let mut seen = HashSet::new();
    let mut last_line = 0;

    for (line, tokens) in significant_lines(text) {
        last_line = line;
        let (key, values) = (tokens[0], &tokens[1..]);
        let repeatable = matches!(key, "objective" | "constraint");
        if !repeatable && !seen.insert(key.to_string()) {
            return Err(parse_err(line, format!("duplicate field '{key}'")));
        }
        match key {
            "kind" => kind = Some(parse_single(line, key, values)?),
            "n" => n = Some(parse_single(line, key, values)?),
            "p" => p = Some(parse_single(line, key, values)?),
            "m" => m = Some(parse_single(line, key, values)?),
            "tasks" => tasks = Some(parse_single(line, key, values)?),
            "sense" => {
                let parsed = values
                    .iter()
                    .map(|v| v.parse::<Sense>().map_err(|e| parse_err(line, e)))
                    .collect::<Result<Vec<_>>>()?;
                senses = Some(parsed);
            }
            "objective" => objectives.push(parse_values(line, key, values)?),
            "weights" => weights = Some(parse_values(line, key, values)?),
            "capacity" => capacity = Some(parse_single(line, key, values)?),
            "constraint" => {
                if values.len() < 2 {
                    return Err(parse_err(
                        line,
                        "constraint needs sense, rhs and coefficients",
                    ));
                }
                let sense: RowSense = values[0].parse().map_err(|e| parse_err(line, e))?;
                let rhs = parse_single(line, "constraint rhs", &values[1..2])?;
                let coeffs = parse_values(line, key, &values[2..])?;
                constraints.push(Constraint::new(coeffs, sense, rhs));
            }
            other => return Err(parse_err(line, format!("unknown field '{other}'"))),
        }
    }

    let missing = |field: &str| parse_err(last_line, format!("missing field '{field}'"));
    let kind = kind.ok_or_else(|| missing("kind"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let p = p.ok_or_else(|| missing("p"))?;
    if p != NUM_OBJECTIVES {
        return Err(Error::Validation(format!(
            "only {NUM_OBJECTIVES} objectives are supported, file declares p = {p}"
        )));
    }
    let senses = senses.ok_or_else(|| missing("sense"))?;
    if senses.len() != p {
        return Err(Error::Validation(format!(
            "{} senses given for {p} objectives",
            senses.len()
        )));
    }
    if objectives.len() != p {
        return Err(Error::Validation(format!(
            "{} objective rows given for {p} objectives",
            objectives.len()
        )));
    }
    if let Some(row) = objectives.iter().find(|r| r.len() != n) {
        return Err(Error::Validation(format!(
            "objective row has {} coefficients, expected {n}",
            row.len()
        )));
    }
    let senses = [senses[0], senses[1], senses[2]];
    let [o1, o2, o3]: [Vec<i64>; 3] = objectives.try_into().expect("length checked");
    let objectives = [o1, o2, o3];

    match kind.as_str() {
        "knapsack" => {
            let weights = weights.ok_or_else(|| missing("weights"))?;
            let capacity = capacity.ok_or_else(|| missing("capacity"))?;
            Problem::new(
                ProblemKind::Knapsack,
                senses,
                objectives,
                vec![Constraint::new(weights, RowSense::Le, capacity)],
            )
        }
        "assignment" => {
            let tasks = tasks.ok_or_else(|| missing("tasks"))?;
            Problem::new(
                ProblemKind::Assignment { tasks },
                senses,
                objectives,
                crate::model::assignment_constraints(tasks),
            )
        }
        "general" => {
            let m = m.ok_or_else(|| missing("m"))?;
            if constraints.len() != m {
                return Err(Error::Validation(format!(
                    "{} constraint rows given, m = {m}",
                    constraints.len()
                )));
            }
            Problem::new(ProblemKind::General, senses, objectives, constraints)
        }
        other => Err(Error::Validation(format!("unknown problem kind '{other}'"))),
    }
}

fn join<T: ToString>(values: impl IntoIterator<Item = T>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn format_instance(problem: &Problem) -> String {
    let mut out = String::new();
    let kind = problem.kind();
    writeln!(out, "kind {}", kind.name()).unwrap();
    writeln!(out, "n {}", problem.n()).unwrap();
    writeln!(out, "p {NUM_OBJECTIVES}").unwrap();
    writeln!(out, "sense {}", join(problem.senses())).unwrap();
    for k in 0..NUM_OBJECTIVES {
        writeln!(out, "objective {}", join(problem.original_row(k))).unwrap();
    }
    match kind {
        ProblemKind::Knapsack => {
            let (weights, capacity) = problem.knapsack_data().expect("knapsack kind");
            writeln!(out, "weights {}", join(weights)).unwrap();
            writeln!(out, "capacity {capacity}").unwrap();
        }
        ProblemKind::Assignment { tasks } => {
            writeln!(out, "tasks {tasks}").unwrap();
        }
        ProblemKind::General => {
            writeln!(out, "m {}", problem.m()).unwrap();
            for row in problem.constraints() {
                writeln!(
                    out,
                    "constraint {} {} {}",
                    row.sense,
                    row.rhs,
                    join(&row.coeffs)
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Problem> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(problem: &Problem, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_instance(problem))?;
    Ok(())
}

/// One line of a front file. Objective values are in original sense.
#[derive(Debug, Clone, PartialEq)]
pub enum FrontRecord {
    Integer {
        x: Vec<u8>,
        y: Point,
    },
    Fractional {
        x: Vec<f64>,
        y: [f64; NUM_OBJECTIVES],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontFile {
    pub senses: [Sense; NUM_OBJECTIVES],
    pub records: Vec<FrontRecord>,
}

impl FrontFile {
    pub fn from_solutions(senses: [Sense; NUM_OBJECTIVES], solutions: &[Solution]) -> Self {
        let records = solutions
            .iter()
            .map(|s| FrontRecord::Integer {
                x: s.x.clone(),
                y: to_original(senses, s.y),
            })
            .collect();
        FrontFile { senses, records }
    }

    /// Minimization-form points of the integer records.
    pub fn integer_points(&self) -> Vec<Point> {
        self.records
            .iter()
            .filter_map(|r| match r {
                FrontRecord::Integer { y, .. } => Some(to_original(self.senses, *y)),
                FrontRecord::Fractional { .. } => None,
            })
            .collect()
    }

    pub fn format(&self) -> String {
        let mut out = String::new();
        writeln!(out, "sense {}", join(self.senses)).unwrap();
        for record in &self.records {
            match record {
                FrontRecord::Integer { x, y } => {
                    writeln!(out, "int {} {}", bits_to_string(x), join(y)).unwrap();
                }
                FrontRecord::Fractional { x, y } => {
                    let xs = x
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    writeln!(out, "frac {xs} {}", join(y)).unwrap();
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut senses = None;
        let mut records = Vec::new();
        for (line, tokens) in significant_lines(text) {
            match tokens[0] {
                "sense" => {
                    let parsed = tokens[1..]
                        .iter()
                        .map(|v| v.parse::<Sense>().map_err(|e| parse_err(line, e)))
                        .collect::<Result<Vec<_>>>()?;
                    let [a, b, c] = parsed[..] else {
                        return Err(parse_err(line, "sense needs three values"));
                    };
                    senses = Some([a, b, c]);
                }
                "int" => {
                    let [_, bits, ys @ ..] = &tokens[..] else {
                        return Err(parse_err(line, "int record needs bits and values"));
                    };
                    let x = bits_from_str(bits)
                        .ok_or_else(|| parse_err(line, format!("invalid bit string '{bits}'")))?;
                    let y: Vec<i64> = parse_values(line, "int", ys)?;
                    let y: Point = y
                        .try_into()
                        .map_err(|_| parse_err(line, "int record needs three values"))?;
                    records.push(FrontRecord::Integer { x, y });
                }
                "frac" => {
                    let [_, xs, ys @ ..] = &tokens[..] else {
                        return Err(parse_err(line, "frac record needs x and values"));
                    };
                    let x = parse_values(line, "frac", &xs.split(',').collect::<Vec<_>>())?;
                    let y: Vec<f64> = parse_values(line, "frac", ys)?;
                    let y: [f64; 3] = y
                        .try_into()
                        .map_err(|_| parse_err(line, "frac record needs three values"))?;
                    records.push(FrontRecord::Fractional { x, y });
                }
                other => return Err(parse_err(line, format!("unknown record '{other}'"))),
            }
        }
        let senses = senses.ok_or_else(|| parse_err(0, "missing sense line"))?;
        Ok(FrontFile { senses, records })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.format())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::p_matrix_knapsack;
    use crate::model::generate::{generate_assignment, generate_knapsack};
    use proptest::prelude::*;

    #[test]
    fn p_matrix_round_trip() {
        let p = p_matrix_knapsack(4);
        let text = format_instance(&p);
        assert!(text.contains("objective 4 2 3 6"));
        assert_eq!(parse_instance(&text).unwrap(), p);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.inst");
        let p = generate_assignment(3, 4, 1..=20).unwrap();
        write_instance(&p, &path).unwrap();
        assert_eq!(read_instance(&path).unwrap(), p);
    }

    #[test]
    fn general_round_trip() {
        let p = Problem::new(
            ProblemKind::General,
            [Sense::Min, Sense::Max, Sense::Min],
            [vec![1, -2, 3], vec![0, 5, 1], vec![2, 2, 2]],
            vec![
                Constraint::new(vec![1, 1, 1], RowSense::Ge, 1),
                Constraint::new(vec![3, -1, 0], RowSense::Le, 2),
            ],
        )
        .unwrap();
        assert_eq!(parse_instance(&format_instance(&p)).unwrap(), p);
    }

    #[test]
    fn rejects_wrong_objective_count() {
        let text = "kind knapsack\nn 1\np 2\nsense max max\nobjective 1\nobjective 1\nweights 1\ncapacity 1\n";
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("p = 2"), "{err}");
    }

    #[test]
    fn rejects_negative_weight() {
        let text = "kind knapsack\nn 2\np 3\nsense max max max\nobjective 1 1\nobjective 1 1\nobjective 1 1\nweights 1 -4\ncapacity 1\n";
        assert!(matches!(parse_instance(text), Err(Error::Validation(_))));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = "kind knapsack\nn four\n";
        match parse_instance(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("'n'"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "kind knapsack\nbogus 1\n";
        assert!(matches!(
            parse_instance(text),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn front_round_trip() {
        let p = p_matrix_knapsack(4);
        let sols = vec![
            Solution::new(&p, vec![1, 0, 1, 0]).unwrap(),
            Solution::new(&p, vec![1, 1, 1, 0]).unwrap(),
        ];
        let mut front = FrontFile::from_solutions(p.senses(), &sols);
        front.records.push(FrontRecord::Fractional {
            x: vec![1.0, 0.5, 1.0, 0.0],
            y: [8.0, 7.5, 10.0],
        });
        let text = front.format();
        assert!(text.starts_with("sense max max max\nint 1010 7 6 8\n"));
        let back = FrontFile::parse(&text).unwrap();
        assert_eq!(back, front);
        assert_eq!(back.integer_points(), vec![[-7, -6, -8], [-9, -9, -12]]);
    }

    proptest! {
        #[test]
        fn generated_instances_round_trip(n in 1usize..20, seed in any::<u64>()) {
            let p = generate_knapsack(n, seed, 1..=1000).unwrap();
            prop_assert_eq!(parse_instance(&format_instance(&p)).unwrap(), p);
        }
    }
}

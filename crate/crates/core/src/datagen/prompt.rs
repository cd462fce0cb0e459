//! Zero-shot prompts in two styles: a satisfiable/unsatisfiable question and
//! a one-shot True/False question.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DataError, LabeledInstance};

const QUESTION: &str = "Q: Given the following set of sentences, tell me whether they are satisfiable or not.";
const ONE_SHOT_TASK: &str =
    "Given the following set of sentences, tell me whether they are satisfiable or not. Generate True if they are and False if they are not.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptStyle {
    /// Answer token "satisfiable" or "unsatisfiable".
    Satisfiable,
    /// One labeled example, answer token "True" or "False".
    TrueFalse,
}

impl PromptStyle {
    pub fn answer(self, sat: bool) -> &'static str {
        match (self, sat) {
            (PromptStyle::Satisfiable, true) => "satisfiable",
            (PromptStyle::Satisfiable, false) => "unsatisfiable",
            (PromptStyle::TrueFalse, true) => "True",
            (PromptStyle::TrueFalse, false) => "False",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PromptStyle::Satisfiable => "satisfiable",
            PromptStyle::TrueFalse => "truefalse",
        }
    }
}

impl std::str::FromStr for PromptStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "satisfiable" => Ok(PromptStyle::Satisfiable),
            "truefalse" => Ok(PromptStyle::TrueFalse),
            _ => Err(format!("unknown prompt style {s:?} (expected satisfiable or truefalse)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub instance: String,
    pub style: PromptStyle,
    pub text: String,
    pub answer: String,
}

/// Sentences as prose: each closed by a full stop, separated by spaces.
fn sentence_list(instance: &LabeledInstance) -> String {
    instance.sentences.iter().map(|s| format!("{s}.")).collect::<Vec<_>>().join(" ")
}

pub fn zero_shot_prompt(
    instance: &LabeledInstance,
    style: PromptStyle,
    example: Option<&LabeledInstance>,
) -> Result<PromptRecord, DataError> {
    let list = sentence_list(instance);
    let text = match style {
        PromptStyle::Satisfiable => format!(
            "{QUESTION} Generate satisfiable if they are and unsatisfiable if they are not.\nSet of sentences: {list}\n\nA:"
        ),
        PromptStyle::TrueFalse => {
            let example = example.ok_or(DataError::MissingExample)?;
            format!(
                "Q: {ONE_SHOT_TASK}\n\nSet of sentences: {}\n\nA: {}\n\n{ONE_SHOT_TASK}\n\nSet of sentences: {list}\n\nA:",
                sentence_list(example),
                style.answer(example.label.is_sat()),
            )
        }
    };
    Ok(PromptRecord {
        instance: instance.id.clone(),
        style,
        text,
        answer: style.answer(instance.label.is_sat()).to_string(),
    })
}

const HEADER: &str = "### ";

/// Each record is a header line `### <id> <style> <answer>` followed by the
/// prompt text; records are separated by blank lines. An optional file
/// header is written first as a `# ` comment line.
pub fn write_prompts(path: &Path, records: &[PromptRecord], header: Option<&str>) -> Result<(), DataError> {
    let mut out = BufWriter::new(File::create(path)?);
    if let Some(h) = header {
        writeln!(out, "# {h}\n")?;
    }
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.write_all(b"\n")?;
        }
        writeln!(out, "{HEADER}{} {} {}", r.instance, r.style.name(), r.answer)?;
        writeln!(out, "{}", r.text)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_prompts<R: Read>(input: R) -> Result<Vec<PromptRecord>, DataError> {
    fn close(records: &mut [PromptRecord], lines: &mut Vec<String>) {
        if lines.last().is_some_and(String::is_empty) {
            lines.pop();
        }
        if let Some(r) = records.last_mut() {
            r.text = lines.join("\n");
        }
        lines.clear();
    }
    let mut records: Vec<PromptRecord> = Vec::new();
    let mut lines = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let malformed = |message: String| DataError::Malformed { line: i + 1, message };
        if let Some(header) = line.strip_prefix(HEADER) {
            close(&mut records, &mut lines);
            let parts: Vec<&str> = header.split(' ').collect();
            let [id, style, answer] = parts[..] else {
                return Err(malformed("bad prompt header".into()));
            };
            let style = style.parse().map_err(malformed)?;
            records.push(PromptRecord { instance: id.into(), style, text: String::new(), answer: answer.into() });
        } else if records.is_empty() && (line.is_empty() || line.starts_with("# ")) {
            continue;
        } else if records.is_empty() {
            return Err(malformed("text before the first header".into()));
        } else {
            lines.push(line);
        }
    }
    close(&mut records, &mut lines);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::Label;
    use crate::grammar::FragmentTag;

    fn instance(id: &str, sentences: &[&str], label: Label) -> LabeledInstance {
        LabeledInstance {
            id: id.into(),
            fragment: FragmentTag::S,
            m: sentences.len(),
            n1: 2,
            n2: 0,
            alpha: sentences.len() as f64 / 2.0,
            beta: None,
            sentences: sentences.iter().map(|s| s.to_string()).collect(),
            fol: Vec::new(),
            label,
            seed: 0,
            solver_ms: None,
            model: None,
        }
    }

    #[test]
    fn satisfiable_style_golden() {
        let i = instance("S-1", &["Every artist is a baker", "No baker is an artist"], Label::Unsat);
        let p = zero_shot_prompt(&i, PromptStyle::Satisfiable, None).unwrap();
        assert_eq!(
            p.text,
            "Q: Given the following set of sentences, tell me whether they are satisfiable or not. Generate \
             satisfiable if they are and unsatisfiable if they are not.\nSet of sentences: Every artist is a baker. \
             No baker is an artist.\n\nA:"
        );
        assert_eq!(p.answer, "unsatisfiable");
    }

    #[test]
    fn true_false_style_golden() {
        let e = instance("S-0", &["Some artist is a baker"], Label::Sat);
        let i = instance("S-1", &["Every artist is a baker"], Label::Sat);
        assert!(matches!(zero_shot_prompt(&i, PromptStyle::TrueFalse, None), Err(DataError::MissingExample)));
        let p = zero_shot_prompt(&i, PromptStyle::TrueFalse, Some(&e)).unwrap();
        let task = "Given the following set of sentences, tell me whether they are satisfiable or not. Generate True \
                    if they are and False if they are not.";
        assert_eq!(
            p.text,
            format!(
                "Q: {task}\n\nSet of sentences: Some artist is a baker.\n\nA: True\n\n{task}\n\nSet of sentences: \
                 Every artist is a baker.\n\nA:"
            )
        );
        assert_eq!(p.answer, "True");
    }

    #[test]
    fn prompt_file_round_trip() {
        let e = instance("S-0", &["Some artist is a baker"], Label::Sat);
        let i = instance("S-1", &["Every artist is a baker", "No baker is an artist"], Label::Unsat);
        let records = vec![
            zero_shot_prompt(&i, PromptStyle::Satisfiable, None).unwrap(),
            zero_shot_prompt(&i, PromptStyle::TrueFalse, Some(&e)).unwrap(),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.txt");
        write_prompts(&path, &records, Some("{}")).unwrap();
        assert_eq!(read_prompts(File::open(&path).unwrap()).unwrap(), records);
    }
}

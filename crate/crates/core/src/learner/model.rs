//! Model files:
//!
//! ```text
//! cadorder-svm 1
//! gamma 0.5
//! bias -0.25
//! dim 11
//! sv 3
//! 1.5 1:0.2 2:-1 ...
//! ```
//!
//! One line per support vector: the dual coefficient, then sparse features.

use super::{KernelParams, LearnerError, SvmModel};

const HEADER: &str = "cadorder-svm 1";

pub fn render_model(model: &SvmModel, dim: usize) -> String {
    let mut out = format!(
        "{HEADER}\ngamma {}\nbias {}\ndim {dim}\nsv {}\n",
        model.kernel.gamma,
        model.bias,
        model.support_vectors.len()
    );
    for (sv, coef) in model.support_vectors.iter().zip(&model.dual_coefficients) {
        out.push_str(&coef.to_string());
        for (i, v) in sv.iter().enumerate() {
            if *v != 0.0 {
                out.push_str(&format!(" {}:{v}", i + 1));
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_model(text: &str) -> Result<SvmModel, LearnerError> {
    let mut lines = text.lines().enumerate();
    let err = |line: usize, message: String| LearnerError::ModelFormat {
        line: line + 1,
        message,
    };
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((i, other)) => return Err(err(i, format!("unsupported header '{other}'"))),
        None => return Err(err(0, "empty model file".into())),
    }
    let mut field = |key: &str| -> Result<(usize, String), LearnerError> {
        let (i, line) = lines
            .next()
            .ok_or_else(|| err(usize::MAX - 1, format!("missing '{key}'")))?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((i, v.trim().to_string())),
            _ => Err(err(i, format!("expected '{key} <value>'"))),
        }
    };
    let num = |(i, v): (usize, String)| -> Result<f64, LearnerError> {
        v.parse().map_err(|_| err(i, format!("bad number '{v}'")))
    };
    let count = |(i, v): (usize, String)| -> Result<usize, LearnerError> {
        v.parse().map_err(|_| err(i, format!("bad count '{v}'")))
    };
    let gamma_line = field("gamma")?;
    let gamma_at = gamma_line.0;
    let kernel = KernelParams::new(num(gamma_line)?).map_err(|e| err(gamma_at, e.to_string()))?;
    let bias = num(field("bias")?)?;
    let dim = count(field("dim")?)?;
    let n = count(field("sv")?)?;
    let mut support_vectors = Vec::with_capacity(n);
    let mut dual_coefficients = Vec::with_capacity(n);
    for (i, line) in lines.by_ref().take(n) {
        let mut parts = line.split_whitespace();
        let coef = parts
            .next()
            .ok_or_else(|| err(i, "empty support vector line".into()))?;
        dual_coefficients.push(num((i, coef.to_string()))?);
        let mut sv = vec![0.0; dim];
        for p in parts {
            let (idx, v) = p
                .split_once(':')
                .ok_or_else(|| err(i, format!("expected index:value, found '{p}'")))?;
            let idx = count((i, idx.to_string()))?;
            if idx == 0 || idx > dim {
                return Err(err(i, format!("index {idx} outside 1..={dim}")));
            }
            sv[idx - 1] = num((i, v.to_string()))?;
        }
        support_vectors.push(sv);
    }
    if support_vectors.len() != n {
        return Err(err(n + 5, format!("expected {n} support vectors")));
    }
    Ok(SvmModel {
        support_vectors,
        dual_coefficients,
        bias,
        kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_text_round_trip() {
        let m = SvmModel {
            support_vectors: vec![vec![0.1, 0.0, -2.5], vec![1.0 / 3.0, 7.0, 0.0]],
            dual_coefficients: vec![1.25, -0.1],
            bias: -0.3,
            kernel: KernelParams::new(0.125).unwrap(),
        };
        let text = render_model(&m, 3);
        assert!(text.starts_with(
            "cadorder-svm 1\ngamma 0.125\nbias -0.3\ndim 3\nsv 2\n1.25 1:0.1 3:-2.5\n"
        ));
        assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn model_errors() {
        assert!(matches!(
            parse_model("cadorder-svm 2\n"),
            Err(LearnerError::ModelFormat { line: 1, .. })
        ));
        assert!(parse_model("cadorder-svm 1\ngamma 1\nbias 0\ndim 2\nsv 2\n1 1:1\n").is_err());
        assert!(parse_model("cadorder-svm 1\ngamma 1\nbias 0\ndim 2\nsv 1\n1 3:1\n").is_err());
    }
}

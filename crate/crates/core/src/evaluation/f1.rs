use super::EvaluationError;

/// F1 of each class in `classes` order. A class with no true positives,
/// false positives or false negatives scores 0.
pub fn per_class_f1<S: AsRef<str>>(predictions: &[S], gold: &[S], classes: &[S]) -> Result<Vec<f64>, EvaluationError> {
    if predictions.len() != gold.len() {
        return Err(EvaluationError::LengthMismatch { hypotheses: predictions.len(), references: gold.len() });
    }
    if classes.is_empty() {
        return Err(EvaluationError::EmptyInput);
    }
    let index = |label: &str| classes.iter().position(|c| c.as_ref() == label);
    let mut tp = vec![0usize; classes.len()];
    let mut fp = vec![0usize; classes.len()];
    let mut fn_ = vec![0usize; classes.len()];
    for (p, g) in predictions.iter().zip(gold) {
        let g_idx = index(g.as_ref()).ok_or_else(|| EvaluationError::UnknownLabel(g.as_ref().to_string()))?;
        match index(p.as_ref()) {
            Some(p_idx) if p_idx == g_idx => tp[g_idx] += 1,
            Some(p_idx) => {
                fp[p_idx] += 1;
                fn_[g_idx] += 1;
            }
            None => fn_[g_idx] += 1,
        }
    }
    Ok((0..classes.len())
        .map(|i| {
            let denom = 2 * tp[i] + fp[i] + fn_[i];
            if denom == 0 {
                0.0
            } else {
                2.0 * tp[i] as f64 / denom as f64
            }
        })
        .collect())
}

/// Unweighted mean of [`per_class_f1`].
pub fn macro_f1<S: AsRef<str>>(predictions: &[S], gold: &[S], classes: &[S]) -> Result<f64, EvaluationError> {
    let f1 = per_class_f1(predictions, gold, classes)?;
    Ok(f1.iter().sum::<f64>() / f1.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_hand_computed() {
        let classes = ["A", "B"];
        assert_eq!(macro_f1(&["A", "B", "B"], &["A", "B", "B"], &classes).unwrap(), 1.0);
        let m = macro_f1(&["A", "A"], &["A", "B"], &classes).unwrap();
        assert!((m - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_predicted_class_of_four() {
        let classes = ["a", "b", "c", "d"];
        let gold = ["a", "b", "c", "d"];
        let pred = ["a"; 4];
        let f1_a = 2.0 * 1.0 / (2.0 + 3.0);
        assert!((macro_f1(&pred, &gold, &classes).unwrap() - f1_a / 4.0).abs() < 1e-12);
    }

    #[test]
    fn absent_class_counts_as_zero() {
        assert_eq!(macro_f1(&["A"], &["A"], &["A", "B"]).unwrap(), 0.5);
    }

    #[test]
    fn errors() {
        assert!(matches!(macro_f1(&["A"], &[], &["A"]), Err(EvaluationError::LengthMismatch { .. })));
        assert!(matches!(macro_f1(&["A"], &["Z"], &["A"]), Err(EvaluationError::UnknownLabel(_))));
    }
}

use crate::alphabet::Labels;

/// Merge adjacent repeats, then drop blanks.
pub fn collapse<L: Labels + ?Sized>(path: &[usize], labels: &L) -> Vec<usize> {
    collapse_with_frames(path, labels).into_iter().map(|(label, _)| label).collect()
}

/// [`collapse`], keeping the frame where each surviving token started.
pub fn collapse_with_frames<L: Labels + ?Sized>(path: &[usize], labels: &L) -> Vec<(usize, usize)> {
    let blank = labels.blank();
    let mut out = Vec::new();
    let mut prev = None;
    for (frame, &label) in path.iter().enumerate() {
        if Some(label) != prev && label != blank {
            out.push((label, frame));
        }
        prev = Some(label);
    }
    out
}

/// Drop leading, trailing and repeated word separators so that the rendered
/// transcript has single interior spaces only.
pub(crate) fn canonical_tokens(tokens: &[(usize, usize)], space: Option<usize>) -> Vec<(usize, usize)> {
    let Some(space) = space else {
        return tokens.to_vec();
    };
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(tokens.len());
    for &(label, frame) in tokens {
        if label == space && out.last().is_none_or(|&(l, _)| l == space) {
            continue;
        }
        out.push((label, frame));
    }
    if out.last().is_some_and(|&(l, _)| l == space) {
        out.pop();
    }
    out
}

//! Constraint sentences and their exact inverse.
//!
//! Every constraint template renders to one fixed English sentence, and
//! [`parse_utterance`] maps those sentences back to constraints. The pair is
//! a strict round trip — [`render_utterance`] followed by [`parse_utterance`]
//! recovers the original constraints — which is what lets the scripted
//! reference agent extract constraints with zero error.

use crate::domain::ConstraintKind;

/// Render one constraint as a sentence (no trailing space).
pub fn render_sentence(kind: &ConstraintKind) -> String {
    use ConstraintKind::*;
    match kind {
        EqValue { entity, category, value } => format!("{entity}'s {category} is {value}."),
        NeqValue { entity, category, value } => {
            format!("{entity}'s {category} is not {value}.")
        }
        NeqAttr { a, b, category } => format!("{a} and {b} differ in {category}."),
        LtAttr { a, b, category } => format!("{a}'s {category} precedes {b}'s {category}."),
        AtSlot { event, slot } => format!("{event} must start at slot {slot}."),
        NotAtSlot { event, slot } => format!("{event} must not start at slot {slot}."),
        SameSlot { a, b } => format!("{a} and {b} must start at the same slot."),
        NotSimultaneous { a, b } => format!("{a} and {b} must start at different slots."),
        DurationEq { event, duration } => {
            format!("{event} must run for {duration} {}.", plural(*duration, "slot"))
        }
        StartBetween { event, lo, hi } => {
            format!("{event} must start between slots {lo} and {hi}.")
        }
        AtPosition { person, seat } => format!("{person} must sit at position {seat}."),
        NotAtPosition { person, seat } => {
            format!("{person} must not sit at position {seat}.")
        }
        Adjacent { a, b } => format!("{a} and {b} must sit next to each other."),
        NotAdjacent { a, b } => format!("{a} and {b} must not sit next to each other."),
        MinSeparation { a, b, min } => {
            format!("{a} and {b} must sit at least {min} {} apart.", plural(*min, "seat"))
        }
        Opposite { a, b } => format!("{a} and {b} must sit directly opposite each other."),
        LeftOf { a, b } => format!("{a} must sit immediately to the left of {b}."),
    }
}

fn plural(n: u32, word: &str) -> String {
    if n == 1 {
        word.to_string()
    } else {
        format!("{word}s")
    }
}

/// Render a turn's constraints as one space-joined utterance.
pub fn render_utterance(kinds: &[ConstraintKind]) -> String {
    kinds.iter().map(render_sentence).collect::<Vec<_>>().join(" ")
}

/// Invert [`render_utterance`]: parse every recognizable sentence back into
/// a constraint, in order. Unrecognized sentences are skipped.
pub fn parse_utterance(text: &str) -> Vec<ConstraintKind> {
    split_sentences(text).iter().filter_map(|s| parse_sentence(s)).collect()
}

fn split_sentences(text: &str) -> Vec<String> {
    text.split_inclusive('.')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Split once on the first occurrence of `sep`.
fn split2<'a>(s: &'a str, sep: &str) -> Option<(&'a str, &'a str)> {
    let at = s.find(sep)?;
    Some((&s[..at], &s[at + sep.len()..]))
}

fn word(s: &str) -> Option<String> {
    (!s.is_empty() && !s.contains(' ')).then(|| s.to_string())
}

fn num(s: &str) -> Option<u32> {
    s.parse().ok()
}

/// Parse one sentence. Negated forms are tried before their positive
/// counterparts so "must not start" never matches "must start".
fn parse_sentence(sentence: &str) -> Option<ConstraintKind> {
    use ConstraintKind::*;
    let s = sentence.strip_suffix('.')?;

    if let Some((rest, b)) = split2(s, " must sit immediately to the left of ") {
        return Some(LeftOf { a: word(rest)?, b: word(b)? });
    }
    if let Some((pair, _)) = split2(s, " must sit directly opposite each other") {
        let (a, b) = split2(pair, " and ")?;
        return Some(Opposite { a: word(a)?, b: word(b)? });
    }
    if let Some((pair, _)) = split2(s, " must not sit next to each other") {
        let (a, b) = split2(pair, " and ")?;
        return Some(NotAdjacent { a: word(a)?, b: word(b)? });
    }
    if let Some((pair, _)) = split2(s, " must sit next to each other") {
        let (a, b) = split2(pair, " and ")?;
        return Some(Adjacent { a: word(a)?, b: word(b)? });
    }
    if let Some((pair, tail)) = split2(s, " must sit at least ") {
        let (a, b) = split2(pair, " and ")?;
        let min = num(tail.strip_suffix(" apart")?.strip_suffix(" seats")
            .or_else(|| tail.strip_suffix(" apart")?.strip_suffix(" seat"))?)?;
        return Some(MinSeparation { a: word(a)?, b: word(b)?, min });
    }
    if let Some((person, seat)) = split2(s, " must not sit at position ") {
        return Some(NotAtPosition { person: word(person)?, seat: num(seat)? });
    }
    if let Some((person, seat)) = split2(s, " must sit at position ") {
        return Some(AtPosition { person: word(person)?, seat: num(seat)? });
    }
    if let Some((event, tail)) = split2(s, " must start between slots ") {
        let (lo, hi) = split2(tail, " and ")?;
        return Some(StartBetween { event: word(event)?, lo: num(lo)?, hi: num(hi)? });
    }
    if let Some((pair, _)) = split2(s, " must start at the same slot") {
        let (a, b) = split2(pair, " and ")?;
        return Some(SameSlot { a: word(a)?, b: word(b)? });
    }
    if let Some((pair, _)) = split2(s, " must start at different slots") {
        let (a, b) = split2(pair, " and ")?;
        return Some(NotSimultaneous { a: word(a)?, b: word(b)? });
    }
    if let Some((event, slot)) = split2(s, " must not start at slot ") {
        return Some(NotAtSlot { event: word(event)?, slot: num(slot)? });
    }
    if let Some((event, slot)) = split2(s, " must start at slot ") {
        return Some(AtSlot { event: word(event)?, slot: num(slot)? });
    }
    if let Some((event, tail)) = split2(s, " must run for ") {
        let n = tail.strip_suffix(" slots").or_else(|| tail.strip_suffix(" slot"))?;
        return Some(DurationEq { event: word(event)?, duration: num(n)? });
    }
    if let Some((pair, category)) = split2(s, " differ in ") {
        let (a, b) = split2(pair, " and ")?;
        return Some(NeqAttr { a: word(a)?, b: word(b)?, category: word(category)? });
    }
    // Possessive forms: "A's cat is v.", "A's cat is not v.", "A's cat precedes B's cat."
    if let Some((owner, rest)) = split2(s, "'s ") {
        if let Some((category, tail)) = split2(rest, " precedes ") {
            let (b, cat2) = split2(tail, "'s ")?;
            if category == cat2 {
                return Some(LtAttr {
                    a: word(owner)?,
                    b: word(b)?,
                    category: word(category)?,
                });
            }
            return None;
        }
        if let Some((category, value)) = split2(rest, " is not ") {
            return Some(NeqValue {
                entity: word(owner)?,
                category: word(category)?,
                value: word(value)?,
            });
        }
        if let Some((category, value)) = split2(rest, " is ") {
            return Some(EqValue {
                entity: word(owner)?,
                category: word(category)?,
                value: word(value)?,
            });
        }
    }
    None
}

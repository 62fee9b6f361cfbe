//! Porter (1980) suffix-stripping stemmer.
//!
//! Follows the rules of the original publication (`ABLI -> ABLE` in step 2,
//! no `LOGI` rule). Words of one or two letters are returned unchanged, as in
//! the reference implementations.

use alloc::string::String;
use alloc::vec::Vec;

/// Stems one lowercase ASCII-alphabetic word. Anything else (digits,
/// uppercase, non-ASCII, internal punctuation) passes through unchanged.
pub fn porter_stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return String::from(word);
    }
    let mut w = Word(word.as_bytes().to_vec());
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5a();
    w.step5b();
    // only ASCII bytes were ever written
    String::from_utf8(w.0).unwrap_or_else(|_| String::from(word))
}

enum Cond {
    None,
    MeasureAbove(usize),
    ContainsVowel,
    EndsSOrT,
}

struct Word(Vec<u8>);

impl Word {
    fn is_consonant(&self, mut i: usize) -> bool {
        // a y flips the class of the letter before it; resolve runs of y
        // without recursion
        let mut flip = false;
        while i > 0 && self.0[i] == b'y' {
            flip = !flip;
            i -= 1;
        }
        let base = !matches!(self.0[i], b'a' | b'e' | b'i' | b'o' | b'u');
        base != flip
    }

    /// m in `[C](VC)^m[V]` over the first `len` letters.
    fn measure(&self, len: usize) -> usize {
        let mut m = 0;
        let mut i = 0;
        while i < len && self.is_consonant(i) {
            i += 1;
        }
        loop {
            while i < len && !self.is_consonant(i) {
                i += 1;
            }
            if i >= len {
                return m;
            }
            while i < len && self.is_consonant(i) {
                i += 1;
            }
            m += 1;
            if i >= len {
                return m;
            }
        }
    }

    fn contains_vowel(&self, len: usize) -> bool {
        (0..len).any(|i| !self.is_consonant(i))
    }

    fn ends_double_consonant(&self, len: usize) -> bool {
        len >= 2 && self.0[len - 1] == self.0[len - 2] && self.is_consonant(len - 1)
    }

    /// `*o`: stem ends consonant-vowel-consonant, last one not w, x or y.
    fn ends_cvc(&self, len: usize) -> bool {
        len >= 3
            && self.is_consonant(len - 3)
            && !self.is_consonant(len - 2)
            && self.is_consonant(len - 1)
            && !matches!(self.0[len - 1], b'w' | b'x' | b'y')
    }

    fn ends_with(&self, suffix: &[u8]) -> bool {
        self.0.ends_with(suffix)
    }

    fn holds(&self, cond: &Cond, stem_len: usize) -> bool {
        match cond {
            Cond::None => true,
            Cond::MeasureAbove(k) => self.measure(stem_len) > *k,
            Cond::ContainsVowel => self.contains_vowel(stem_len),
            Cond::EndsSOrT => stem_len > 0 && matches!(self.0[stem_len - 1], b's' | b't') && self.measure(stem_len) > 1,
        }
    }

    fn replace(&mut self, suffix_len: usize, replacement: &[u8]) {
        let stem_len = self.0.len() - suffix_len;
        self.0.truncate(stem_len);
        self.0.extend_from_slice(replacement);
    }

    /// Applies the first rule whose suffix matches. Returns whether the
    /// rule fired; a matching rule with a failing condition stops the scan.
    fn apply_rules(&mut self, rules: &[(&[u8], &[u8], Cond)]) -> bool {
        for (suffix, replacement, cond) in rules {
            if self.ends_with(suffix) {
                let stem_len = self.0.len() - suffix.len();
                if self.holds(cond, stem_len) {
                    self.replace(suffix.len(), replacement);
                    return true;
                }
                return false;
            }
        }
        false
    }

    fn step1a(&mut self) {
        self.apply_rules(&[
            (b"sses", b"ss", Cond::None),
            (b"ies", b"i", Cond::None),
            (b"ss", b"ss", Cond::None),
            (b"s", b"", Cond::None),
        ]);
    }

    fn step1b(&mut self) {
        if self.ends_with(b"eed") {
            if self.measure(self.0.len() - 3) > 0 {
                self.replace(1, b"");
            }
            return;
        }
        let mut stripped = false;
        for suffix in [&b"ed"[..], &b"ing"[..]] {
            if self.ends_with(suffix) {
                let stem_len = self.0.len() - suffix.len();
                if self.holds(&Cond::ContainsVowel, stem_len) {
                    self.replace(suffix.len(), b"");
                    stripped = true;
                }
                break;
            }
        }
        if !stripped {
            return;
        }
        let len = self.0.len();
        if self.ends_with(b"at") || self.ends_with(b"bl") || self.ends_with(b"iz") {
            self.0.push(b'e');
        } else if self.ends_double_consonant(len) && !matches!(self.0[len - 1], b'l' | b's' | b'z') {
            self.0.pop();
        } else if self.measure(len) == 1 && self.ends_cvc(len) {
            self.0.push(b'e');
        }
    }

    fn step1c(&mut self) {
        if self.ends_with(b"y") && self.contains_vowel(self.0.len() - 1) {
            let last = self.0.len() - 1;
            self.0[last] = b'i';
        }
    }

    fn step2(&mut self) {
        self.apply_rules(&[
            (b"ational", b"ate", Cond::MeasureAbove(0)),
            (b"tional", b"tion", Cond::MeasureAbove(0)),
            (b"enci", b"ence", Cond::MeasureAbove(0)),
            (b"anci", b"ance", Cond::MeasureAbove(0)),
            (b"izer", b"ize", Cond::MeasureAbove(0)),
            (b"abli", b"able", Cond::MeasureAbove(0)),
            (b"alli", b"al", Cond::MeasureAbove(0)),
            (b"entli", b"ent", Cond::MeasureAbove(0)),
            (b"eli", b"e", Cond::MeasureAbove(0)),
            (b"ousli", b"ous", Cond::MeasureAbove(0)),
            (b"ization", b"ize", Cond::MeasureAbove(0)),
            (b"ation", b"ate", Cond::MeasureAbove(0)),
            (b"ator", b"ate", Cond::MeasureAbove(0)),
            (b"alism", b"al", Cond::MeasureAbove(0)),
            (b"iveness", b"ive", Cond::MeasureAbove(0)),
            (b"fulness", b"ful", Cond::MeasureAbove(0)),
            (b"ousness", b"ous", Cond::MeasureAbove(0)),
            (b"aliti", b"al", Cond::MeasureAbove(0)),
            (b"iviti", b"ive", Cond::MeasureAbove(0)),
            (b"biliti", b"ble", Cond::MeasureAbove(0)),
        ]);
    }

    fn step3(&mut self) {
        self.apply_rules(&[
            (b"icate", b"ic", Cond::MeasureAbove(0)),
            (b"ative", b"", Cond::MeasureAbove(0)),
            (b"alize", b"al", Cond::MeasureAbove(0)),
            (b"iciti", b"ic", Cond::MeasureAbove(0)),
            (b"ical", b"ic", Cond::MeasureAbove(0)),
            (b"ful", b"", Cond::MeasureAbove(0)),
            (b"ness", b"", Cond::MeasureAbove(0)),
        ]);
    }

    fn step4(&mut self) {
        self.apply_rules(&[
            (b"al", b"", Cond::MeasureAbove(1)),
            (b"ance", b"", Cond::MeasureAbove(1)),
            (b"ence", b"", Cond::MeasureAbove(1)),
            (b"er", b"", Cond::MeasureAbove(1)),
            (b"ic", b"", Cond::MeasureAbove(1)),
            (b"able", b"", Cond::MeasureAbove(1)),
            (b"ible", b"", Cond::MeasureAbove(1)),
            (b"ant", b"", Cond::MeasureAbove(1)),
            (b"ement", b"", Cond::MeasureAbove(1)),
            (b"ment", b"", Cond::MeasureAbove(1)),
            (b"ent", b"", Cond::MeasureAbove(1)),
            (b"ion", b"", Cond::EndsSOrT),
            (b"ou", b"", Cond::MeasureAbove(1)),
            (b"ism", b"", Cond::MeasureAbove(1)),
            (b"ate", b"", Cond::MeasureAbove(1)),
            (b"iti", b"", Cond::MeasureAbove(1)),
            (b"ous", b"", Cond::MeasureAbove(1)),
            (b"ive", b"", Cond::MeasureAbove(1)),
            (b"ize", b"", Cond::MeasureAbove(1)),
        ]);
    }

    fn step5a(&mut self) {
        if self.ends_with(b"e") {
            let stem_len = self.0.len() - 1;
            let m = self.measure(stem_len);
            if m > 1 || (m == 1 && !self.ends_cvc(stem_len)) {
                self.0.pop();
            }
        }
    }

    fn step5b(&mut self) {
        let len = self.0.len();
        if self.measure(len) > 1 && self.ends_double_consonant(len) && self.0[len - 1] == b'l' {
            self.0.pop();
        }
    }
}

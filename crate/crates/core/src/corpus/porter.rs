//! Porter suffix-stripping stemmer.
//!
//! Follows Martin Porter's reference C implementation, including its two
//! departures from the 1980 description (`bli -> ble` replaces
//! `abli -> able`, and `logi -> log` is added in step 2).
//!
//! Input is expected lowercase. Words shorter than three letters, and words
//! containing anything other than `a`-`z`, are returned unchanged.

/// Stems one lowercase word.
pub fn stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut s = Stemmer {
        b: word.as_bytes().to_vec(),
        j: 0,
    };
    s.step1ab();
    if s.b.len() > 1 {
        s.step1c();
        s.step2();
        s.step3();
        s.step4();
        s.step5();
    }
    // Only ASCII bytes are ever written.
    String::from_utf8(s.b).expect("ascii")
}

struct Stemmer {
    b: Vec<u8>,
    /// End (exclusive) of the stem left after a successful `ends` match.
    j: usize,
}

impl Stemmer {
    fn cons(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.cons(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in `b[..self.j]`.
    fn m(&self) -> usize {
        let end = self.j;
        let mut n = 0;
        let mut i = 0;
        loop {
            if i >= end {
                return n;
            }
            if !self.cons(i) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i >= end {
                    return n;
                }
                if self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i >= end {
                    return n;
                }
                if !self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..self.j).any(|i| !self.cons(i))
    }

    /// `b[i-1], b[i]` is a double consonant.
    fn doublec(&self, i: usize) -> bool {
        i >= 1 && self.b[i] == self.b[i - 1] && self.cons(i)
    }

    /// consonant-vowel-consonant ending at `i`, last consonant not w, x or y.
    fn cvc(&self, i: usize) -> bool {
        if i < 2 || !self.cons(i) || self.cons(i - 1) || !self.cons(i - 2) {
            return false;
        }
        !matches!(self.b[i], b'w' | b'x' | b'y')
    }

    fn ends(&mut self, suffix: &[u8]) -> bool {
        if suffix.len() > self.b.len() || !self.b.ends_with(suffix) {
            return false;
        }
        self.j = self.b.len() - suffix.len();
        true
    }

    fn set_to(&mut self, replacement: &[u8]) {
        self.b.truncate(self.j);
        self.b.extend_from_slice(replacement);
    }

    fn replace_if_m(&mut self, replacement: &[u8]) {
        if self.m() > 0 {
            self.set_to(replacement);
        }
    }

    fn step1ab(&mut self) {
        if self.b.last() == Some(&b's') {
            if self.ends(b"sses") {
                self.b.truncate(self.b.len() - 2);
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.b[self.b.len() - 2] != b's' {
                self.b.pop();
            }
        }
        if self.ends(b"eed") {
            if self.m() > 0 {
                self.b.pop();
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.vowel_in_stem() {
            self.b.truncate(self.j);
            if self.ends(b"at") {
                self.set_to(b"ate");
            } else if self.ends(b"bl") {
                self.set_to(b"ble");
            } else if self.ends(b"iz") {
                self.set_to(b"ize");
            } else if self.doublec(self.b.len() - 1) {
                let last = self.b[self.b.len() - 1];
                if !matches!(last, b'l' | b's' | b'z') {
                    self.b.pop();
                }
            } else {
                self.j = self.b.len();
                if self.m() == 1 && self.cvc(self.b.len() - 1) {
                    self.b.push(b'e');
                }
            }
        }
    }

    fn step1c(&mut self) {
        if self.ends(b"y") && self.vowel_in_stem() {
            let n = self.b.len();
            self.b[n - 1] = b'i';
        }
    }

    fn step2(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"ational", b"ate"),
            (b"tional", b"tion"),
            (b"enci", b"ence"),
            (b"anci", b"ance"),
            (b"izer", b"ize"),
            (b"bli", b"ble"),
            (b"alli", b"al"),
            (b"entli", b"ent"),
            (b"eli", b"e"),
            (b"ousli", b"ous"),
            (b"ization", b"ize"),
            (b"ation", b"ate"),
            (b"ator", b"ate"),
            (b"alism", b"al"),
            (b"iveness", b"ive"),
            (b"fulness", b"ful"),
            (b"ousness", b"ous"),
            (b"aliti", b"al"),
            (b"iviti", b"ive"),
            (b"biliti", b"ble"),
            (b"logi", b"log"),
        ];
        self.apply_first(RULES);
    }

    fn step3(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"icate", b"ic"),
            (b"ative", b""),
            (b"alize", b"al"),
            (b"iciti", b"ic"),
            (b"ical", b"ic"),
            (b"ful", b""),
            (b"ness", b""),
        ];
        self.apply_first(RULES);
    }

    /// Applies the first rule whose suffix matches. Once a suffix matches no
    /// later rule is tried, whether or not its `m > 0` condition held.
    fn apply_first(&mut self, rules: &[(&[u8], &[u8])]) {
        for (suffix, replacement) in rules {
            if self.ends(suffix) {
                self.replace_if_m(replacement);
                return;
            }
        }
    }

    fn step4(&mut self) {
        const SUFFIXES: &[&[u8]] = &[
            b"al", b"ance", b"ence", b"er", b"ic", b"able", b"ible", b"ant", b"ement", b"ment", b"ent",
            b"ion", b"ou", b"ism", b"ate", b"iti", b"ous", b"ive", b"ize",
        ];
        let mut matched = false;
        for suffix in SUFFIXES {
            if self.ends(suffix) {
                if *suffix == b"ion" {
                    // ion only counts after s or t
                    if self.j == 0 || !matches!(self.b[self.j - 1], b's' | b't') {
                        return;
                    }
                }
                matched = true;
                break;
            }
        }
        if matched && self.m() > 1 {
            self.b.truncate(self.j);
        }
    }

    fn step5(&mut self) {
        let n = self.b.len();
        self.j = n;
        if self.b[n - 1] == b'e' {
            self.j = n - 1;
            let a = self.m();
            if a > 1 || (a == 1 && !self.cvc(n - 2)) {
                self.b.pop();
            }
        }
        let n = self.b.len();
        self.j = n;
        if self.b[n - 1] == b'l' && self.doublec(n - 1) && self.m() > 1 {
            self.b.pop();
        }
    }
}

//! Ehrenfeucht–Fraïssé game solved by exhaustive minimax, independently of
//! the type computation.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::structure::LabStructure;
use super::types::{check_guard, check_vocabulary, Frame, DEFAULT_TYPE_WORK};
use super::MsoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    Point,
    Set,
}

/// One round: Alice picks `choice` in the structure on `side`, Bob answers
/// with `response` in the other one. Points are element indices, sets are
/// membership masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Round {
    pub mover: Player,
    pub kind: MoveKind,
    pub side: Side,
    pub choice: u64,
    pub response: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameTrace {
    pub rounds: Vec<Round>,
    pub winner: Player,
}

impl GameTrace {
    /// Human-readable listing, one round per line.
    pub fn render(&self, left: &LabStructure, right: &LabStructure) -> String {
        let mut out = String::new();
        for (i, r) in self.rounds.iter().enumerate() {
            let (from, to, a, b) = match r.side {
                Side::Left => (left, right, "left", "right"),
                Side::Right => (right, left, "right", "left"),
            };
            let show = |s: &LabStructure, v: u64| match r.kind {
                MoveKind::Point => s.label(v as usize),
                MoveKind::Set => s.set_label(v),
            };
            let kind = match r.kind {
                MoveKind::Point => "point",
                MoveKind::Set => "set",
            };
            writeln!(
                out,
                "round {}: Alice {kind} move {} in {a}; Bob answers {} in {b}",
                i + 1,
                show(from, r.choice),
                show(to, r.response)
            )
            .unwrap();
        }
        writeln!(out, "winner: {:?}", self.winner).unwrap();
        out
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
struct Pos {
    pa: Vec<usize>,
    sa: Vec<u64>,
    pb: Vec<usize>,
    sb: Vec<u64>,
}

impl Pos {
    fn extend(&self, kind: MoveKind, side: Side, choice: u64, response: u64) -> Pos {
        let mut p = self.clone();
        let (left, right) = match side {
            Side::Left => (choice, response),
            Side::Right => (response, choice),
        };
        match kind {
            MoveKind::Point => {
                p.pa.push(left as usize);
                p.pb.push(right as usize);
            }
            MoveKind::Set => {
                p.sa.push(left);
                p.sb.push(right);
            }
        }
        p
    }
}

struct Game<'a> {
    a: Frame<'a>,
    b: Frame<'a>,
    consts_a: Vec<usize>,
    consts_b: Vec<usize>,
    memo: HashMap<(usize, Pos), bool>,
}

impl<'a> Game<'a> {
    fn partial_iso(&self, p: &Pos) -> bool {
        self.a.diagram(&p.pa, &p.sa) == self.b.diagram(&p.pb, &p.sb)
    }

    fn frames(&self, side: Side) -> (&Frame<'a>, &Frame<'a>) {
        match side {
            Side::Left => (&self.a, &self.b),
            Side::Right => (&self.b, &self.a),
        }
    }

    /// Alice's moves in a fixed order: points left, points right, sets left, sets right.
    fn alice_moves(&self) -> Vec<(MoveKind, Side, u64)> {
        let mut out = Vec::new();
        for kind in [MoveKind::Point, MoveKind::Set] {
            for side in [Side::Left, Side::Right] {
                let s = self.frames(side).0.s;
                match kind {
                    MoveKind::Point => out.extend((0..s.size() as u64).map(|x| (kind, side, x))),
                    MoveKind::Set => out.extend((0..=s.full_mask()).map(|m| (kind, side, m))),
                }
            }
        }
        out
    }

    /// Every response in the other structure, starting with the one that
    /// copies the choice through the current correspondence. Only the order
    /// is heuristic; all responses are offered.
    fn responses(&self, p: &Pos, kind: MoveKind, side: Side, choice: u64) -> Vec<u64> {
        let to = self.frames(side).1;
        let (named_from, named_to) = match side {
            Side::Left => (
                self.consts_a.iter().chain(&p.pa).copied().collect::<Vec<_>>(),
                self.consts_b.iter().chain(&p.pb).copied().collect::<Vec<_>>(),
            ),
            Side::Right => (
                self.consts_b.iter().chain(&p.pb).copied().collect::<Vec<_>>(),
                self.consts_a.iter().chain(&p.pa).copied().collect::<Vec<_>>(),
            ),
        };
        let all: Vec<u64> = match kind {
            MoveKind::Point => (0..to.s.size() as u64).collect(),
            MoveKind::Set => (0..=to.s.full_mask()).collect(),
        };
        let guess = match kind {
            MoveKind::Point => named_from
                .iter()
                .position(|&x| x as u64 == choice)
                .map(|i| named_to[i] as u64)
                .or_else(|| ((choice as usize) < to.s.size()).then_some(choice)),
            MoveKind::Set => {
                let mut m = choice & to.s.full_mask();
                for (&x, &y) in named_from.iter().zip(&named_to) {
                    m = (m & !(1 << y)) | (choice >> x & 1) << y;
                }
                Some(m)
            }
        };
        match guess {
            Some(g) => std::iter::once(g).chain(all.into_iter().filter(|&v| v != g)).collect(),
            None => all,
        }
    }

    fn bob_wins(&mut self, p: &Pos, r: usize) -> bool {
        if !self.partial_iso(p) {
            return false;
        }
        if r == 0 {
            return true;
        }
        if let Some(&v) = self.memo.get(&(r, p.clone())) {
            return v;
        }
        let result = self.winning_alice_move(p, r).is_none();
        self.memo.insert((r, p.clone()), result);
        result
    }

    fn winning_alice_move(&mut self, p: &Pos, r: usize) -> Option<(MoveKind, Side, u64)> {
        for (kind, side, choice) in self.alice_moves() {
            if self.winning_response(p, r, kind, side, choice).is_none() {
                return Some((kind, side, choice));
            }
        }
        None
    }

    fn winning_response(&mut self, p: &Pos, r: usize, kind: MoveKind, side: Side, choice: u64) -> Option<u64> {
        self.responses(p, kind, side, choice)
            .into_iter()
            .find(|&resp| self.bob_wins(&p.extend(kind, side, choice, resp), r - 1))
    }
}

/// Solves the ρ-round game on `a` (left) and `b` (right) and returns the
/// winner with one line of optimal play of full length ρ.
pub fn ef_game_search(a: &LabStructure, b: &LabStructure, rho: usize) -> Result<(Player, GameTrace), MsoError> {
    check_vocabulary(a, b)?;
    check_guard(a, rho, DEFAULT_TYPE_WORK)?;
    check_guard(b, rho, DEFAULT_TYPE_WORK)?;
    let mut g = Game {
        a: Frame::new(a),
        b: Frame::new(b),
        consts_a: a.constants().values().copied().collect(),
        consts_b: b.constants().values().copied().collect(),
        memo: HashMap::new(),
    };
    let mut p = Pos::default();
    let winner = if g.bob_wins(&p, rho) { Player::Bob } else { Player::Alice };
    let mut rounds = Vec::new();
    for r in (1..=rho).rev() {
        let (kind, side, choice) = match winner {
            Player::Alice => g
                .winning_alice_move(&p, r)
                .or_else(|| g.alice_moves().first().copied())
                .expect("set moves always exist"),
            Player::Bob => g.alice_moves()[0],
        };
        let response = match winner {
            Player::Bob => g.winning_response(&p, r, kind, side, choice).expect("Bob has a winning answer"),
            Player::Alice => g.responses(&p, kind, side, choice).first().copied().unwrap_or(0),
        };
        rounds.push(Round { mover: Player::Alice, kind, side, choice, response });
        p = p.extend(kind, side, choice, response);
    }
    debug_assert_eq!(g.partial_iso(&p), winner == Player::Bob);
    Ok((winner, GameTrace { rounds, winner }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msolab::types::ef_equivalent;

    fn word(letters: &[u64]) -> LabStructure {
        LabStructure::word_with_letters(letters).unwrap()
    }

    #[test]
    fn identical_rank_zero() {
        let w = word(&[0, 1]);
        let (winner, trace) = ef_game_search(&w, &w, 0).unwrap();
        assert_eq!(winner, Player::Bob);
        assert!(trace.rounds.is_empty());
    }

    #[test]
    fn swapped_letters_need_a_point_move() {
        let (a, b) = (word(&[0, 1]), word(&[1, 0]));
        let (winner, trace) = ef_game_search(&a, &b, 1).unwrap();
        assert_eq!(winner, Player::Alice);
        assert_eq!(trace.rounds.len(), 1);
        assert_eq!(trace.rounds[0].kind, MoveKind::Point);
        assert!(trace.render(&a, &b).contains("winner: Alice"));
    }

    #[test]
    fn agrees_with_types_on_small_words() {
        let words: Vec<LabStructure> = (0..=3usize)
            .flat_map(|len| (0..1u64 << len).map(move |bits| (0..len).map(|i| bits >> i & 1).collect::<Vec<_>>()))
            .filter(|l| !l.is_empty())
            .map(|l| word(&l))
            .collect();
        for a in &words {
            for b in &words {
                for rho in 0..=2 {
                    let (winner, trace) = ef_game_search(a, b, rho).unwrap();
                    assert_eq!(winner == Player::Bob, ef_equivalent(a, b, rho).unwrap());
                    assert_eq!(trace.rounds.len(), rho);
                }
            }
        }
    }
}

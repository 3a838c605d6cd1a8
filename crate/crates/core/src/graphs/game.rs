//! Two-player min-parity games solved with the classical recursive
//! algorithm.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    fn opponent(self) -> Self {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    fn of_priority(p: u32) -> Self {
        if p % 2 == 0 {
            Player::Even
        } else {
            Player::Odd
        }
    }
}

/// A game graph where every vertex has at least one successor.
#[derive(Clone, Debug)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

/// Winning region of Even and a positional strategy for Even on it.
#[derive(Clone, Debug)]
pub struct GameSolution {
    pub even_wins: Vec<bool>,
    /// For Even-owned vertices in Even's region, the chosen successor.
    pub even_strategy: Vec<Option<usize>>,
}

impl ParityGame {
    pub fn new(owner: Vec<Player>, priority: Vec<u32>, succ: Vec<Vec<usize>>) -> Self {
        let mut pred = vec![Vec::new(); succ.len()];
        for (v, list) in succ.iter().enumerate() {
            for &w in list {
                pred[w].push(v);
            }
        }
        Self { owner, priority, succ, pred }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn solve(&self) -> GameSolution {
        let mut strategy = vec![None; self.len()];
        let all = vec![true; self.len()];
        let even_wins = self.zielonka(&all, &mut strategy);
        for v in 0..self.len() {
            if !even_wins[v] || self.owner[v] != Player::Even {
                strategy[v] = None;
            }
        }
        GameSolution { even_wins, even_strategy: strategy }
    }

    /// Attractor of `target` for `player` inside `mask`, with a strategy
    /// for `player`'s vertices that strictly decreases the attractor rank.
    fn attractor(&self, mask: &[bool], target: &[bool], player: Player, strategy: &mut [Option<usize>]) -> Vec<bool> {
        let n = self.len();
        let mut rank = vec![usize::MAX; n];
        let mut count: Vec<usize> = (0..n)
            .map(|v| if mask[v] { self.succ[v].iter().filter(|&&w| mask[w]).count() } else { 0 })
            .collect();
        let mut queue = VecDeque::new();
        for v in 0..n {
            if mask[v] && target[v] {
                rank[v] = 0;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &u in &self.pred[v] {
                if !mask[u] || rank[u] != usize::MAX {
                    continue;
                }
                let join = if self.owner[u] == player {
                    true
                } else {
                    count[u] -= 1;
                    count[u] == 0
                };
                if join {
                    rank[u] = rank[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        for v in 0..n {
            if rank[v] != usize::MAX && rank[v] > 0 && self.owner[v] == player && player == Player::Even {
                strategy[v] = self.succ[v].iter().copied().find(|&w| mask[w] && rank[w] < rank[v]);
            }
        }
        rank.iter().map(|&r| r != usize::MAX).collect()
    }

    /// Returns Even's winning region inside the subgame `mask`, writing
    /// Even's strategy for that region into `strategy`.
    fn zielonka(&self, mask: &[bool], strategy: &mut [Option<usize>]) -> Vec<bool> {
        let n = self.len();
        let Some(d) = (0..n).filter(|&v| mask[v]).map(|v| self.priority[v]).min() else {
            return vec![false; n];
        };
        let player = Player::of_priority(d);
        let top: Vec<bool> = (0..n).map(|v| mask[v] && self.priority[v] == d).collect();
        let attr = self.attractor(mask, &top, player, strategy);
        let rest: Vec<bool> = (0..n).map(|v| mask[v] && !attr[v]).collect();
        let even_rest = self.zielonka(&rest, strategy);
        let opp_rest: Vec<bool> = (0..n)
            .map(|v| rest[v] && (even_rest[v] == (player.opponent() == Player::Even)))
            .collect();
        if !opp_rest.iter().any(|&b| b) {
            if player == Player::Even {
                for v in 0..n {
                    if top[v] && self.owner[v] == Player::Even {
                        strategy[v] = self.succ[v].iter().copied().find(|&w| mask[w]);
                    }
                }
                return mask.to_vec();
            }
            return vec![false; n];
        }
        let opp = player.opponent();
        let opp_attr = self.attractor(mask, &opp_rest, opp, strategy);
        let remaining: Vec<bool> = (0..n).map(|v| mask[v] && !opp_attr[v]).collect();
        let even_remaining = self.zielonka(&remaining, strategy);
        match player {
            // Odd keeps its attractor; Even wins only what it wins in the rest.
            Player::Even => even_remaining,
            // Even wins its attractor region plus what it wins in the rest.
            Player::Odd => (0..n).map(|v| opp_attr[v] || even_remaining[v]).collect(),
        }
    }
}

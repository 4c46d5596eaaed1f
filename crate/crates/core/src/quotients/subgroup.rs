use super::QuotientGroup;

/// A subgroup of an enumerated group, as a membership mask plus member list.
#[derive(Clone, Debug)]
pub struct Subgroup {
    mask: Vec<bool>,
    members: Vec<u32>,
    gens: Vec<u32>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.mask == other.mask
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub fn trivial(parent_order: usize) -> Self {
        let mut mask = vec![false; parent_order];
        mask[0] = true;
        Subgroup {
            mask,
            members: vec![0],
            gens: Vec::new(),
        }
    }

    /// Wraps a member list that is already known to be a subgroup.
    pub(crate) fn from_members(parent_order: usize, members: Vec<u32>) -> Self {
        let mut mask = vec![false; parent_order];
        for &m in &members {
            mask[m as usize] = true;
        }
        Subgroup {
            mask,
            gens: members.clone(),
            members,
        }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, e: u32) -> bool {
        self.mask[e as usize]
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    /// Generators actually added during closure (redundant ones skipped).
    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    /// Adds `g` and closes up. The current member set is a union of right
    /// cosets of the old subgroup, so only coset representatives need to be
    /// multiplied by the generators.
    pub fn add_generator(&mut self, g: &QuotientGroup, x: u32) {
        if self.contains(x) {
            return;
        }
        self.gens.push(x);
        let old: Vec<u32> = self.members.clone();
        let mut reps = vec![0u32];
        let add_coset = |s: &mut Subgroup, c: u32, reps: &mut Vec<u32>| {
            for &h in &old {
                let e = g.mul(h, c);
                s.mask[e as usize] = true;
                s.members.push(e);
            }
            reps.push(c);
        };
        add_coset(self, x, &mut reps);
        let mut i = 0;
        while i < reps.len() {
            let r = reps[i];
            for k in 0..self.gens.len() {
                let c = g.mul(r, self.gens[k]);
                if !self.contains(c) {
                    add_coset(self, c, &mut reps);
                }
            }
            i += 1;
        }
    }

    /// Whether conjugation by every generator of `g` preserves the subgroup.
    pub fn is_normal_in(&self, g: &QuotientGroup) -> bool {
        g.generators()
            .iter()
            .all(|&x| self.gens.iter().all(|&s| self.contains(g.conjugate(s, x))))
    }

    /// Whether every member commutes with every generator of `g`.
    pub fn is_central_in(&self, g: &QuotientGroup) -> bool {
        let gens = g.generators();
        self.members.iter().all(|&m| gens.iter().all(|&x| g.mul(m, x) == g.mul(x, m)))
    }

    /// `log_p` of the index in `g`.
    pub fn log_index(&self, g: &QuotientGroup) -> u32 {
        super::log_p(g.order() / self.order(), g.p())
    }
}

/// Smallest subgroup containing `gens`.
pub fn closure(g: &QuotientGroup, gens: &[u32]) -> Subgroup {
    let mut s = Subgroup::trivial(g.order());
    for &x in gens {
        s.add_generator(g, x);
    }
    s
}

/// Smallest normal subgroup containing `gens`.
pub fn normal_closure(g: &QuotientGroup, gens: &[u32]) -> Subgroup {
    let mut s = closure(g, gens);
    let xs = g.generators();
    let mut done = 0;
    while done < s.gens.len() {
        let y = s.gens[done];
        for &x in &xs {
            let c = g.conjugate(y, x);
            s.add_generator(g, c);
        }
        done += 1;
    }
    s
}

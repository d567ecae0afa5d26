use std::collections::HashSet;

use crate::building::Flag;
use crate::charclass::PsiData;
use crate::exactlin::RationalMatrix;
use crate::par;
use crate::weyl::fixed_points;

use super::{ray_data, Conditions, ConeContext, ModuliCandidate, ModuliError, Status};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CensusOptions {
    /// Stop after this many points.
    pub limit: Option<usize>,
    pub conditions: Conditions,
}

/// Torus-fixed points of the moduli space, in lexicographic order of the
/// fixed-point index chosen at each ray.
pub fn census(psi: &PsiData, limit: Option<usize>) -> Result<Vec<ModuliCandidate>, ModuliError> {
    census_with(
        psi,
        &CensusOptions {
            limit,
            ..Default::default()
        },
    )
}

pub fn census_with(
    psi: &PsiData,
    opts: &CensusOptions,
) -> Result<Vec<ModuliCandidate>, ModuliError> {
    let rays = ray_data(psi)?;
    let r = psi.rank();
    let fan = psi.fan();
    let options: Vec<Vec<Flag>> = rays
        .iter()
        .map(|d| {
            fixed_points(&d.parabolic)
                .iter()
                .map(Flag::from_coordinate)
                .collect()
        })
        .collect();
    let ctx = ConeContext::new(psi, &rays, opts.conditions);
    let identity = RationalMatrix::identity(r);

    // Local tuples accepted on each maximal cone, keyed by fixed-point index.
    let accepted: Vec<HashSet<Vec<usize>>> = par::map_range(fan.maximal_cones().len(), |c| {
        let cone_rays = fan.maximal_cones()[c].rays();
        let sizes: Vec<usize> = cone_rays.iter().map(|&x| options[x].len()).collect();
        let mut ok = HashSet::new();
        for_each_index(&sizes, |idx| {
            let flags: Vec<&Flag> = cone_rays
                .iter()
                .zip(idx)
                .map(|(&x, &i)| &options[x][i])
                .collect();
            if ctx.check_cone(c, &flags, Some(&identity)).status == Status::Accepted {
                ok.insert(idx.to_vec());
            }
        });
        ok
    });

    // Cones become checkable once their highest ray is assigned.
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); rays.len()];
    for (c, cone) in fan.maximal_cones().iter().enumerate() {
        closing[*cone.rays().iter().max().expect("cones are non-empty")].push(c);
    }

    let mut out = Vec::new();
    let mut choice = Vec::with_capacity(rays.len());
    let mut search = Search {
        options: &options,
        accepted: &accepted,
        closing: &closing,
        cones: fan
            .maximal_cones()
            .iter()
            .map(|c| c.rays().to_vec())
            .collect(),
        limit: opts.limit,
        rank: r,
    };
    search.run(&mut choice, &mut out);
    Ok(out)
}

struct Search<'a> {
    options: &'a [Vec<Flag>],
    accepted: &'a [HashSet<Vec<usize>>],
    closing: &'a [Vec<usize>],
    cones: Vec<Vec<usize>>,
    limit: Option<usize>,
    rank: usize,
}

impl Search<'_> {
    fn full(&self, out: &[ModuliCandidate]) -> bool {
        self.limit.is_some_and(|l| out.len() >= l)
    }

    fn run(&mut self, choice: &mut Vec<usize>, out: &mut Vec<ModuliCandidate>) {
        let ray = choice.len();
        if ray == self.options.len() {
            let flags = choice
                .iter()
                .enumerate()
                .map(|(x, &i)| self.options[x][i].clone())
                .collect();
            out.push(ModuliCandidate {
                rank: self.rank,
                flags,
            });
            return;
        }
        for i in 0..self.options[ray].len() {
            if self.full(out) {
                return;
            }
            choice.push(i);
            let consistent = self.closing[ray].iter().all(|&c| {
                let local: Vec<usize> = self.cones[c].iter().map(|&x| choice[x]).collect();
                self.accepted[c].contains(&local)
            });
            if consistent {
                self.run(choice, out);
            }
            choice.pop();
        }
    }
}

/// Calls `f` on every index vector below `sizes`, last position fastest.
fn for_each_index(sizes: &[usize], mut f: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut idx = vec![0; sizes.len()];
    loop {
        f(&idx);
        let Some(k) = (0..sizes.len()).rev().find(|&k| idx[k] + 1 < sizes[k]) else {
            return;
        };
        idx[k] += 1;
        idx[k + 1..].iter_mut().for_each(|x| *x = 0);
    }
}

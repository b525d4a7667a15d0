//! Average-linkage agglomerative clustering of language profiles, with
//! cosine distance (1 - cosine) between profiles. Exposes the merge tree so
//! callers can cut it at any cluster count or distance.

use crate::error::{Error, Result};
use crate::langid::LanguageProfile;

/// One merge step: clusters `a` and `b` joined at the given average
/// distance. Node ids 0..n are the leaves (profiles in sorted-label order);
/// id n+i is the cluster formed by the i-th merge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
}

/// The full merge tree over a profile set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    /// Leaf labels in node-id order.
    pub labels: Vec<String>,
    /// Merges in the order performed; distances are nondecreasing.
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Leaf index sets of the clusters left after undoing the last k-1
    /// merges, each cluster sorted, clusters ordered by smallest member.
    pub fn cut(&self, k: usize) -> Result<Vec<Vec<usize>>> {
        let n = self.labels.len();
        if k == 0 || k > n {
            return Err(Error::InvalidConfig(format!(
                "cannot cut {n} leaves into {k} clusters"
            )));
        }
        self.clusters_after(n - k)
    }

    /// Clusters formed by applying only the merges at distance <= t.
    pub fn cut_distance(&self, t: f64) -> Result<Vec<Vec<usize>>> {
        let applied = self.merges.iter().take_while(|m| m.distance <= t).count();
        self.clusters_after(applied)
    }

    fn clusters_after(&self, merges_applied: usize) -> Result<Vec<Vec<usize>>> {
        let n = self.labels.len();
        // members[id] is None once the node has been merged into a parent.
        let mut members: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
        for m in &self.merges[..merges_applied] {
            let mut a = members[m.a].take().expect("merge references a live node");
            let b = members[m.b].take().expect("merge references a live node");
            a.extend(b);
            a.sort_unstable();
            members.push(Some(a));
        }
        let mut out: Vec<Vec<usize>> = members.into_iter().flatten().collect();
        out.sort_by_key(|c| c[0]);
        Ok(out)
    }

    /// Labels of a `cut` result.
    pub fn named(&self, clusters: &[Vec<usize>]) -> Vec<Vec<String>> {
        clusters
            .iter()
            .map(|c| c.iter().map(|&i| self.labels[i].clone()).collect())
            .collect()
    }
}

/// Build the dendrogram. Profiles are taken in sorted-label order so the
/// result does not depend on input order; ties in merge distance go to the
/// pair with the smallest leaf ids.
pub fn cluster_profiles(profiles: &[LanguageProfile]) -> Result<Dendrogram> {
    if profiles.len() < 2 {
        return Err(Error::InvalidConfig(
            "clustering needs at least 2 profiles".into(),
        ));
    }
    let mut order: Vec<usize> = (0..profiles.len()).collect();
    order.sort_by(|&i, &j| profiles[i].label.cmp(&profiles[j].label));
    let labels: Vec<String> = order.iter().map(|&i| profiles[i].label.clone()).collect();

    let n = order.len();
    let mut base = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = profiles[order[i]]
                .profile
                .cosine(&profiles[order[j]].profile)?;
            base[i][j] = 1.0 - c;
            base[j][i] = 1.0 - c;
        }
    }

    // Active clusters as (node id, member leaves). Average linkage is
    // recomputed from the base matrix each round; at the profile counts in
    // play (tens of languages) the n^3 cost is irrelevant and the
    // implementation stays obviously order-free.
    let mut active: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::with_capacity(n - 1);
    while active.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for x in 0..active.len() {
            for y in x + 1..active.len() {
                let mut sum = 0.0;
                for &i in &active[x].1 {
                    for &j in &active[y].1 {
                        sum += base[i][j];
                    }
                }
                let d = sum / (active[x].1.len() * active[y].1.len()) as f64;
                let better = match best {
                    None => true,
                    Some((bd, bx, by)) => {
                        d < bd
                            || (d == bd
                                && (active[x].1[0], active[y].1[0])
                                    < (active[bx].1[0], active[by].1[0]))
                    }
                };
                if better {
                    best = Some((d, x, y));
                }
            }
        }
        let (d, x, y) = best.expect("at least one pair remains");
        let (id_b, mut mem_b) = active.swap_remove(y);
        let (id_a, mut mem_a) = active.swap_remove(x);
        merges.push(Merge {
            a: id_a,
            b: id_b,
            distance: d,
        });
        mem_a.append(&mut mem_b);
        mem_a.sort_unstable();
        active.push((n + merges.len() - 1, mem_a));
    }
    Ok(Dendrogram { labels, merges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::Dimension;
    use crate::langid::synth::generate_paired_languages;
    use crate::langid::{
        build_profile, letter_codebook, NormalizePolicy, TrigramEncoder,
    };

    fn profiles_from(texts: &[(&str, &str)]) -> Vec<LanguageProfile> {
        let cb = letter_codebook(Dimension::new(2000).unwrap(), 41);
        let enc = TrigramEncoder::new(&cb).unwrap();
        texts
            .iter()
            .map(|(label, text)| {
                build_profile(label, text, &enc, NormalizePolicy::StripToSpace).unwrap()
            })
            .collect()
    }

    #[test]
    fn two_profiles_merge_once() {
        let profiles = profiles_from(&[("a", "abc abd abe"), ("b", "xyz wxy vwx")]);
        let d = cluster_profiles(&profiles).unwrap();
        assert_eq!(d.labels, ["a", "b"]);
        assert_eq!(d.merges.len(), 1);
        assert_eq!((d.merges[0].a, d.merges[0].b), (0, 1));
        assert_eq!(d.cut(2).unwrap(), [[0], [1]]);
        assert_eq!(d.cut(1).unwrap(), [[0, 1]]);
        assert!(d.cut(0).is_err());
        assert!(d.cut(3).is_err());
        assert!(cluster_profiles(&profiles[..1]).is_err());
    }

    #[test]
    fn input_order_does_not_matter() {
        let mut profiles = profiles_from(&[
            ("da", "abc abd abe abf"),
            ("nb", "abc abd abg abh"),
            ("qq", "xyz wxy vwx uvw"),
        ]);
        let fwd = cluster_profiles(&profiles).unwrap();
        profiles.reverse();
        let rev = cluster_profiles(&profiles).unwrap();
        assert_eq!(fwd, rev);
    }

    #[test]
    fn related_pairs_merge_before_unrelated() {
        // Two families of two languages each: members of a pair share a
        // letter inventory, the pairs are disjoint, so within-pair distance
        // is far below cross-pair distance.
        let langs = generate_paired_languages(2, 200, 0, 99);
        let cb = letter_codebook(Dimension::new(4000).unwrap(), 43);
        let enc = TrigramEncoder::new(&cb).unwrap();
        let profiles: Vec<LanguageProfile> = langs
            .iter()
            .map(|l| {
                build_profile(&l.label, &l.train_text, &enc, NormalizePolicy::StripToSpace)
                    .unwrap()
            })
            .collect();
        let d = cluster_profiles(&profiles).unwrap();
        let two = d.named(&d.cut(2).unwrap());
        for cluster in &two {
            assert_eq!(cluster.len(), 2, "uneven cut: {two:?}");
            let fam: Vec<&str> = cluster
                .iter()
                .map(|l| l.rsplit_once('-').unwrap().0)
                .collect();
            assert_eq!(fam[0], fam[1], "mixed families in {two:?}");
        }
        // The two cheap merges happen before the expensive root.
        assert!(d.merges[0].distance <= d.merges[2].distance);
        assert!(d.merges[1].distance <= d.merges[2].distance);

        let loose = d.cut_distance(2.0).unwrap();
        assert_eq!(loose.len(), 1);
        let tight = d.cut_distance(-1.0).unwrap();
        assert_eq!(tight.len(), 4);
    }
}

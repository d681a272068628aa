//! Indoor deployment: TRP grid, UE drop and attachment, and static CoMP sets.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrpId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance_2d(&self, other: &Position) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        libm::sqrt(dx * dx + dy * dy)
    }

    pub fn distance_3d(&self, other: &Position) -> f64 {
        let dz = self.z - other.z;
        let d2 = self.distance_2d(other);
        libm::sqrt(d2 * d2 + dz * dz)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trp {
    pub id: TrpId,
    pub position: Position,
    pub tx_power_dbm: f64,
    pub n_tx: usize,
    pub antenna_gain_dbi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ue {
    pub id: UeId,
    pub position: Position,
    pub n_rx: usize,
    pub serving_trp: TrpId,
}

/// A disjoint group of coordinating TRPs together with the union of their
/// attached users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompSet {
    pub id: usize,
    pub trp_ids: Vec<TrpId>,
    pub user_vector: Vec<UeId>,
}

impl CompSet {
    pub fn contains(&self, trp: TrpId) -> bool {
        self.trp_ids.contains(&trp)
    }

    pub fn len(&self) -> usize {
        self.trp_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trp_ids.is_empty()
    }
}

/// Hall geometry and TRP defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutConfig {
    pub trp_count: usize,
    pub isd_m: f64,
    pub floor_length_m: f64,
    pub floor_width_m: f64,
    /// Distance of each TRP row from its long wall.
    pub wall_offset_m: f64,
    pub trp_height_m: f64,
    pub ue_height_m: f64,
    pub tx_power_dbm: f64,
    pub n_tx: usize,
    pub antenna_gain_dbi: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            trp_count: 8,
            isd_m: 30.0,
            floor_length_m: 120.0,
            floor_width_m: 50.0,
            wall_offset_m: 15.0,
            trp_height_m: 6.0,
            ue_height_m: 1.5,
            tx_power_dbm: 24.0,
            n_tx: 2,
            antenna_gain_dbi: 5.0,
        }
    }
}

/// Places TRPs in two rows parallel to the long walls, `isd` apart along each
/// row and centered lengthwise. A single TRP sits at the floor center.
pub fn build_indoor_layout(config: &LayoutConfig) -> Result<Vec<Trp>> {
    let count = config.trp_count;
    let layout_err = |reason| Error::Layout { count, reason };
    if count == 0 {
        return Err(layout_err("at least one TRP is required"));
    }
    if config.n_tx == 0 {
        return Err(layout_err("TRPs need at least one antenna"));
    }
    if !config.tx_power_dbm.is_finite() {
        return Err(layout_err("transmit power must be finite"));
    }
    let (cx, cy) = (config.floor_length_m / 2.0, config.floor_width_m / 2.0);
    let z = config.trp_height_m;
    let make = |id: usize, x: f64, y: f64| Trp {
        id: TrpId(id),
        position: Position::new(x, y, z),
        tx_power_dbm: config.tx_power_dbm,
        n_tx: config.n_tx,
        antenna_gain_dbi: config.antenna_gain_dbi,
    };
    if count == 1 {
        return Ok(vec![make(0, cx, cy)]);
    }
    if count % 2 != 0 {
        return Err(layout_err("the two-row grid needs an even TRP count"));
    }
    let per_row = count / 2;
    let span = config.isd_m * (per_row - 1) as f64;
    let x0 = cx - span / 2.0;
    if x0 < 0.0 || config.wall_offset_m * 2.0 > config.floor_width_m {
        return Err(layout_err("grid does not fit on the floor"));
    }
    let rows = [config.wall_offset_m, config.floor_width_m - config.wall_offset_m];
    let trps = rows
        .iter()
        .enumerate()
        .flat_map(|(r, &y)| (0..per_row).map(move |i| (r * per_row + i, x0 + config.isd_m * i as f64, y)))
        .map(|(id, x, y)| make(id, x, y))
        .collect();
    Ok(trps)
}

/// Serving TRP per UE: argmax of coupling gain, ties to the lowest TRP id.
///
/// `gains_db[ue][trp]` holds the coupling gain of every pair.
pub fn attach_users(gains_db: &[Vec<f64>]) -> Vec<TrpId> {
    gains_db.iter().map(|row| best_trp(row)).collect()
}

fn best_trp(gains_db: &[f64]) -> TrpId {
    let mut best = 0;
    for (i, &g) in gains_db.iter().enumerate().skip(1) {
        if g > gains_db[best] {
            best = i;
        }
    }
    TrpId(best)
}

/// Upper bound on candidate positions tried per placed UE.
pub const MAX_DROP_ATTEMPTS_PER_UE: usize = 10_000;

/// Drops `n_per_trp` users for every TRP, uniformly over the floor.
///
/// `realize` is called for each candidate position and returns the coupling
/// gains to every TRP plus any per-link state the caller wants to keep. A
/// candidate whose best TRP is already full is rejected and redrawn.
pub fn drop_users<R, L, F>(
    trps: &[Trp],
    config: &LayoutConfig,
    n_rx: usize,
    n_per_trp: usize,
    rng: &mut R,
    mut realize: F,
) -> Result<(Vec<Ue>, Vec<L>)>
where
    R: Rng + ?Sized,
    F: FnMut(&Position, &mut R) -> (Vec<f64>, L),
{
    let total = trps.len() * n_per_trp;
    let max_attempts = total.max(1) * MAX_DROP_ATTEMPTS_PER_UE;
    let mut load = vec![0usize; trps.len()];
    let mut ues = Vec::with_capacity(total);
    let mut links = Vec::with_capacity(total);
    let mut attempts = 0;
    while ues.len() < total {
        if attempts >= max_attempts {
            return Err(Error::UserDrop { per_trp: n_per_trp, attempts });
        }
        attempts += 1;
        let position = Position::new(
            rng.random::<f64>() * config.floor_length_m,
            rng.random::<f64>() * config.floor_width_m,
            config.ue_height_m,
        );
        let (gains, link) = realize(&position, rng);
        let serving = best_trp(&gains);
        if load[serving.0] >= n_per_trp {
            continue;
        }
        load[serving.0] += 1;
        ues.push(Ue { id: UeId(ues.len()), position, n_rx, serving_trp: serving });
        links.push(link);
    }
    Ok((ues, links))
}

/// Greedy nearest-neighbour partition into sets of at most `max_coord` TRPs.
///
/// The lowest unassigned TRP id seeds each set, which then absorbs its nearest
/// unassigned TRPs (ties to lower id). User vectors are filled from `ues`.
pub fn form_comp_sets(trps: &[Trp], ues: &[Ue], max_coord: usize) -> Vec<CompSet> {
    let max_coord = max_coord.max(1);
    let mut assigned = vec![false; trps.len()];
    let mut sets = Vec::new();
    for seed in 0..trps.len() {
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        let mut members = vec![seed];
        let mut candidates: Vec<usize> = (0..trps.len()).filter(|&i| !assigned[i]).collect();
        let origin = trps[seed].position;
        candidates.sort_by(|&a, &b| {
            let da = origin.distance_2d(&trps[a].position);
            let db = origin.distance_2d(&trps[b].position);
            da.partial_cmp(&db).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b))
        });
        for c in candidates.into_iter().take(max_coord - 1) {
            assigned[c] = true;
            members.push(c);
        }
        members.sort_unstable();
        let trp_ids: Vec<TrpId> = members.into_iter().map(|i| trps[i].id).collect();
        let user_vector = users_of(&trp_ids, ues);
        sets.push(CompSet { id: sets.len(), trp_ids, user_vector });
    }
    sets
}

/// One singleton set per TRP (no coordination).
pub fn singleton_sets(trps: &[Trp], ues: &[Ue]) -> Vec<CompSet> {
    form_comp_sets(trps, ues, 1)
}

/// Union of the users attached to any of `trp_ids`, in UE id order.
pub fn users_of(trp_ids: &[TrpId], ues: &[Ue]) -> Vec<UeId> {
    ues.iter().filter(|u| trp_ids.contains(&u.serving_trp)).map(|u| u.id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn layout8() -> Vec<Trp> {
        build_indoor_layout(&LayoutConfig::default()).unwrap()
    }

    #[test]
    fn eight_trp_grid_coordinates() {
        let trps = layout8();
        assert_eq!(trps.len(), 8);
        let xs = [15.0, 45.0, 75.0, 105.0];
        for (i, t) in trps.iter().enumerate() {
            assert_eq!(t.id, TrpId(i));
            assert_eq!(t.position.x, xs[i % 4]);
            assert_eq!(t.position.y, if i < 4 { 15.0 } else { 35.0 });
            assert_eq!(t.position.z, 6.0);
            assert_eq!(t.n_tx, 2);
            assert_eq!(t.tx_power_dbm, 24.0);
        }
        assert_eq!(trps[0].position.distance_2d(&trps[1].position), 30.0);
        assert_eq!(trps[6].position.distance_2d(&trps[7].position), 30.0);
    }

    #[test]
    fn single_trp_at_center() {
        let cfg = LayoutConfig { trp_count: 1, ..LayoutConfig::default() };
        let trps = build_indoor_layout(&cfg).unwrap();
        assert_eq!(trps.len(), 1);
        assert_eq!((trps[0].position.x, trps[0].position.y), (60.0, 25.0));
    }

    #[test]
    fn odd_or_oversized_grid_is_rejected() {
        let odd = LayoutConfig { trp_count: 5, ..LayoutConfig::default() };
        assert!(matches!(build_indoor_layout(&odd), Err(Error::Layout { count: 5, .. })));
        let wide = LayoutConfig { trp_count: 12, isd_m: 30.0, ..LayoutConfig::default() };
        assert!(build_indoor_layout(&wide).is_err());
        let none = LayoutConfig { trp_count: 0, ..LayoutConfig::default() };
        assert!(build_indoor_layout(&none).is_err());
    }

    #[test]
    fn attachment_argmax_and_tie_break() {
        let gains = vec![vec![-80.0, -95.0], vec![-90.0, -70.0], vec![-1.0, -3.0, -1.0]];
        assert_eq!(attach_users(&gains), vec![TrpId(0), TrpId(1), TrpId(0)]);
        let tie = vec![vec![-99.0, -99.0, -70.0, -99.0, -99.0, -70.0]];
        assert_eq!(attach_users(&tie), vec![TrpId(2)]);
        assert_eq!(attach_users(&[vec![-120.0]]), vec![TrpId(0)]);
    }

    fn distance_gains(trps: &[Trp]) -> impl FnMut(&Position, &mut ChaCha8Rng) -> (Vec<f64>, ()) + '_ {
        move |p, _| (trps.iter().map(|t| -p.distance_3d(&t.position)).collect(), ())
    }

    #[test]
    fn drop_users_balances_load_exactly() {
        let trps = layout8();
        let cfg = LayoutConfig::default();
        for n in [3, 5] {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let (ues, _) = drop_users(&trps, &cfg, 4, n, &mut rng, distance_gains(&trps)).unwrap();
            assert_eq!(ues.len(), 8 * n);
            for t in &trps {
                assert_eq!(ues.iter().filter(|u| u.serving_trp == t.id).count(), n);
            }
            assert!(ues.iter().all(|u| u.position.z == 1.5 && u.n_rx == 4));
        }
    }

    #[test]
    fn drop_users_single_trp() {
        let cfg = LayoutConfig { trp_count: 1, ..LayoutConfig::default() };
        let trps = build_indoor_layout(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (ues, _) = drop_users(&trps, &cfg, 4, 1, &mut rng, distance_gains(&trps)).unwrap();
        assert_eq!(ues.len(), 1);
        assert_eq!(ues[0].serving_trp, TrpId(0));
    }

    #[test]
    fn drop_users_is_seed_deterministic() {
        let trps = layout8();
        let cfg = LayoutConfig::default();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            drop_users(&trps, &cfg, 4, 3, &mut rng, distance_gains(&trps)).unwrap().0
        };
        let (a, b) = (run(), run());
        for (u, v) in a.iter().zip(&b) {
            assert_eq!(u.position.x.to_bits(), v.position.x.to_bits());
            assert_eq!(u.position.y.to_bits(), v.position.y.to_bits());
        }
    }

    #[test]
    fn unreachable_attachment_fails() {
        let trps = layout8();
        let cfg = LayoutConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Every candidate attaches to TRP 0, so the other seven never fill.
        let always_zero = |_: &Position, _: &mut ChaCha8Rng| {
            let mut g = vec![-100.0; 8];
            g[0] = 0.0;
            (g, ())
        };
        let err = drop_users(&trps, &cfg, 4, 1, &mut rng, always_zero).unwrap_err();
        assert!(matches!(err, Error::UserDrop { per_trp: 1, .. }));
    }

    #[test]
    fn comp_sets_pairs_columns() {
        let trps = layout8();
        let sets = form_comp_sets(&trps, &[], 2);
        let ids: Vec<Vec<usize>> = sets.iter().map(|s| s.trp_ids.iter().map(|t| t.0).collect()).collect();
        assert_eq!(ids, vec![vec![0, 4], vec![1, 5], vec![2, 6], vec![3, 7]]);
        for s in &sets {
            let d = trps[s.trp_ids[0].0].position.distance_2d(&trps[s.trp_ids[1].0].position);
            assert_eq!(d, 20.0);
        }
    }

    #[test]
    fn comp_sets_sizes() {
        let trps = layout8();
        assert_eq!(form_comp_sets(&trps, &[], 1).len(), 8);
        let four = form_comp_sets(&trps, &[], 4);
        assert_eq!(four.len(), 2);
        assert!(four.iter().all(|s| s.len() == 4));
        let three = form_comp_sets(&trps, &[], 3);
        assert!(three.iter().all(|s| s.len() <= 3));
        assert_eq!(three.iter().map(CompSet::len).sum::<usize>(), 8);
    }

    #[test]
    fn user_vector_is_union_of_members() {
        let trps = layout8();
        let cfg = LayoutConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (ues, _) = drop_users(&trps, &cfg, 4, 3, &mut rng, distance_gains(&trps)).unwrap();
        for set in form_comp_sets(&trps, &ues, 2) {
            assert_eq!(set.user_vector.len(), 6);
            for u in &set.user_vector {
                assert!(set.contains(ues[u.0].serving_trp));
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn partition_covers_every_trp_once(max_coord in 1usize..=8) {
            let trps = layout8();
            let sets = form_comp_sets(&trps, &[], max_coord);
            let mut count = [0usize; 8];
            for s in &sets {
                proptest::prop_assert!(!s.is_empty() && s.len() <= max_coord);
                for t in &s.trp_ids { count[t.0] += 1; }
            }
            proptest::prop_assert!(count.iter().all(|&c| c == 1));
        }

        #[test]
        fn attachment_invariant_under_common_offset(
            gains in proptest::collection::vec(proptest::collection::vec(-140.0f64..-40.0, 8), 1..10),
            offset in -50.0f64..50.0,
        ) {
            let shifted: Vec<Vec<f64>> =
                gains.iter().map(|r| r.iter().map(|g| g + offset).collect()).collect();
            let a = attach_users(&gains);
            let b = attach_users(&shifted);
            // A shift can only flip exact ties created by rounding; skip those rows.
            for (i, row) in gains.iter().enumerate() {
                let best = row[a[i].0];
                let near_tie = row.iter().enumerate().any(|(j, g)| j != a[i].0 && (best - g).abs() < 1e-9);
                if !near_tie { proptest::prop_assert_eq!(a[i], b[i]); }
            }
        }
    }
}

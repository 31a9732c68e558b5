//! Binary cache for preprocessing artifacts.
//!
//! The file starts with a magic tag and a SHA-256 key over the network
//! structure and the preprocessing options. A rerun on unchanged inputs loads
//! the artifacts back instead of rebuilding them; any mismatch or damage
//! falls back to a rebuild.

use super::IoError;
use crate::assignment::{PreprocessOptions, PreprocessedData};
use crate::network::{Edge, TransitNetwork, WalkingGraph};
use crate::shortcuts::ShortcutGraph;
use crate::walk::{BucketIndex, ContractionHierarchy, CoreGraph};
use sha2::{Digest, Sha256};
use std::path::Path;

const MAGIC: &[u8; 8] = b"TACACHE1";

/// Key over everything the artifacts depend on. Field order is part of the
/// format: changing it invalidates existing caches, which is the safe
/// direction.
pub fn cache_key(net: &TransitNetwork, options: &PreprocessOptions) -> [u8; 32] {
    let mut h = Sha256::new();
    let u32s = |h: &mut Sha256, vals: &[u32]| {
        for v in vals {
            h.update(v.to_le_bytes());
        }
    };
    u32s(
        &mut h,
        &[
            net.stops.len() as u32,
            net.trips.len() as u32,
            net.connections.len() as u32,
            net.graph.num_vertices() as u32,
        ],
    );
    for s in &net.stops {
        u32s(&mut h, &[s.vertex, s.buffer_time]);
    }
    for t in &net.trips {
        u32s(&mut h, &[t.connections.len() as u32]);
        u32s(&mut h, &t.connections);
    }
    for c in &net.connections {
        u32s(
            &mut h,
            &[
                c.id,
                c.dep_stop,
                c.arr_stop,
                c.dep_time.seconds(),
                c.arr_time.seconds(),
                c.trip,
                c.index_in_trip,
            ],
        );
    }
    for e in net.graph.edges() {
        u32s(&mut h, &[e.from, e.to, e.walk_time]);
    }
    u32s(&mut h, &[net.zones.len() as u32]);
    for z in &net.zones {
        u32s(&mut h, &[z.outgoing.len() as u32, z.incoming.len() as u32]);
        for &(stop, t) in z.outgoing.iter().chain(&z.incoming) {
            u32s(&mut h, &[stop, t]);
        }
    }
    u32s(&mut h, &[options.max_transfer_time]);
    h.update(options.avg_degree_limit.to_bits().to_le_bytes());
    h.finalize().into()
}

struct Writer(Vec<u8>);

impl Writer {
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32s(&mut self, vals: &[u32]) {
        self.u64(vals.len() as u64);
        for v in vals {
            self.0.extend_from_slice(&v.to_le_bytes());
        }
    }
    fn pairs(&mut self, vals: &[(u32, u32)]) {
        self.u64(vals.len() as u64);
        for &(a, b) in vals {
            self.0.extend_from_slice(&a.to_le_bytes());
            self.0.extend_from_slice(&b.to_le_bytes());
        }
    }
    fn triples(&mut self, vals: &[(u32, u32, u32)]) {
        self.u64(vals.len() as u64);
        for &(a, b, c) in vals {
            self.0.extend_from_slice(&a.to_le_bytes());
            self.0.extend_from_slice(&b.to_le_bytes());
            self.0.extend_from_slice(&c.to_le_bytes());
        }
    }
    fn bools(&mut self, vals: &[bool]) {
        self.u64(vals.len() as u64);
        self.0.extend(vals.iter().map(|&b| b as u8));
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let Some(end) = end else {
            return Err(format!("truncated at byte {}", self.pos));
        };
        let slice = &self.data[self.pos..end];
        self.pos = end;
        Ok(slice)
    }
    fn u64(&mut self) -> Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn len(&mut self) -> Result<usize, String> {
        let n = self.u64()?;
        // Every element is at least one byte, so a length beyond the
        // remaining bytes is corruption, not a huge allocation request.
        if n as usize > self.data.len() - self.pos {
            return Err(format!("implausible length {n} at byte {}", self.pos - 8));
        }
        Ok(n as usize)
    }
    fn u32s(&mut self) -> Result<Vec<u32>, String> {
        let n = self.len()?;
        let bytes = self.take(n * 4)?;
        Ok(bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
    fn pairs(&mut self) -> Result<Vec<(u32, u32)>, String> {
        let n = self.len()?;
        let bytes = self.take(n * 8)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| {
                (
                    u32::from_le_bytes(c[0..4].try_into().unwrap()),
                    u32::from_le_bytes(c[4..8].try_into().unwrap()),
                )
            })
            .collect())
    }
    fn triples(&mut self) -> Result<Vec<(u32, u32, u32)>, String> {
        let n = self.len()?;
        let bytes = self.take(n * 12)?;
        Ok(bytes
            .chunks_exact(12)
            .map(|c| {
                (
                    u32::from_le_bytes(c[0..4].try_into().unwrap()),
                    u32::from_le_bytes(c[4..8].try_into().unwrap()),
                    u32::from_le_bytes(c[8..12].try_into().unwrap()),
                )
            })
            .collect())
    }
    fn bools(&mut self) -> Result<Vec<bool>, String> {
        let n = self.len()?;
        Ok(self.take(n)?.iter().map(|&b| b != 0).collect())
    }
}

pub fn save_cache(
    path: &Path,
    net: &TransitNetwork,
    options: &PreprocessOptions,
    data: &PreprocessedData,
) -> Result<(), IoError> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.0.extend_from_slice(&cache_key(net, options));

    let (rank, up_offsets, up_edges, down_offsets, down_edges) = data.ch.raw_parts();
    w.u32s(rank);
    w.u32s(up_offsets);
    w.pairs(up_edges);
    w.u32s(down_offsets);
    w.pairs(down_edges);

    w.u64(data.core.graph.num_vertices() as u64);
    let edges: Vec<(u32, u32, u32)> = data
        .core
        .graph
        .edges()
        .map(|e| (e.from, e.to, e.walk_time))
        .collect();
    w.triples(&edges);
    w.bools(&data.core.core);

    w.u64(net.stops.len() as u64);
    w.triples(data.shortcuts.edges());

    let (
        num_vertices,
        slots,
        slot_stops,
        num_stops,
        forward_offsets,
        forward_entries,
        backward_offsets,
        backward_entries,
    ) = data.buckets.raw_parts();
    w.u64(num_vertices as u64);
    w.u32s(slots);
    w.u64(slot_stops.len() as u64);
    for stops in slot_stops {
        w.u32s(stops);
    }
    w.u64(num_stops as u64);
    w.u32s(forward_offsets);
    w.pairs(forward_entries);
    w.u32s(backward_offsets);
    w.pairs(backward_entries);

    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| IoError::file(parent, e))?;
    }
    std::fs::write(path, &w.0).map_err(|e| IoError::file(path, e))
}

/// What a cache probe found. `Damaged` is worth a warning before the
/// rebuild; the other misses are routine.
#[derive(Debug)]
pub enum CacheLoad {
    Hit(Box<PreprocessedData>),
    NoFile,
    /// Key mismatch: the network or the options changed.
    Stale,
    Damaged(String),
}

pub fn load_cache(path: &Path, net: &TransitNetwork, options: &PreprocessOptions) -> CacheLoad {
    let bytes = match std::fs::read(path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return CacheLoad::NoFile,
        Err(e) => return CacheLoad::Damaged(e.to_string()),
    };
    match parse_cache(&bytes, &cache_key(net, options)) {
        Ok(Some(data)) => CacheLoad::Hit(Box::new(data)),
        Ok(None) => CacheLoad::Stale,
        Err(message) => CacheLoad::Damaged(message),
    }
}

fn parse_cache(bytes: &[u8], expect_key: &[u8; 32]) -> Result<Option<PreprocessedData>, String> {
    let mut r = Reader { data: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err("bad magic".into());
    }
    if r.take(32)? != expect_key {
        return Ok(None);
    }

    let rank = r.u32s()?;
    let up_offsets = r.u32s()?;
    let up_edges = r.pairs()?;
    let down_offsets = r.u32s()?;
    let down_edges = r.pairs()?;
    let ch = ContractionHierarchy::from_raw(rank, up_offsets, up_edges, down_offsets, down_edges);

    let num_vertices = r.u64()? as usize;
    let edges: Vec<Edge> = r
        .triples()?
        .into_iter()
        .map(|(from, to, walk_time)| Edge { from, to, walk_time })
        .collect();
    if edges
        .iter()
        .any(|e| e.from as usize >= num_vertices || e.to as usize >= num_vertices)
    {
        return Err("core edge endpoint out of range".into());
    }
    let core = CoreGraph {
        graph: WalkingGraph::new(num_vertices, edges),
        core: r.bools()?,
    };

    let num_stops = r.u64()? as usize;
    let shortcut_edges = r.triples()?;
    if shortcut_edges
        .iter()
        .any(|&(from, to, _)| from as usize >= num_stops || to as usize >= num_stops)
    {
        return Err("shortcut endpoint out of range".into());
    }
    let shortcuts = ShortcutGraph::from_edges(shortcut_edges, num_stops);

    let bucket_vertices = r.u64()? as usize;
    let slots = r.u32s()?;
    let slot_count = r.len()?;
    let mut slot_stops = Vec::with_capacity(slot_count);
    for _ in 0..slot_count {
        slot_stops.push(r.u32s()?);
    }
    let bucket_stops = r.u64()? as usize;
    let forward_offsets = r.u32s()?;
    let forward_entries = r.pairs()?;
    let backward_offsets = r.u32s()?;
    let backward_entries = r.pairs()?;
    let buckets = BucketIndex::from_raw(
        bucket_vertices,
        slots,
        slot_stops,
        bucket_stops,
        forward_offsets,
        forward_entries,
        backward_offsets,
        backward_entries,
    );

    if r.pos != bytes.len() {
        return Err(format!("{} trailing bytes", bytes.len() - r.pos));
    }
    Ok(Some(PreprocessedData {
        ch,
        core,
        shortcuts,
        buckets,
    }))
}

//! GeoJSON export of per-connection loads for map rendering.

use super::fixed6;
use crate::assignment::AssignmentResult;
use crate::network::TransitNetwork;
use serde_json::json;

/// Renders one LineString feature per connection whose endpoints both carry
/// coordinates. Returns the document and the number of skipped connections.
///
/// `expected_passengers` uses the same six-decimal rounding as the
/// utilization table, so the two outputs always agree.
pub fn export_geojson(
    net: &TransitNetwork,
    coordinates: &[Option<(f64, f64)>],
    result: &AssignmentResult,
) -> (String, usize) {
    let mut features = Vec::new();
    let mut skipped = 0usize;
    for c in &net.connections {
        let (Some(&Some(dep)), Some(&Some(arr))) = (
            coordinates.get(c.dep_stop as usize),
            coordinates.get(c.arr_stop as usize),
        ) else {
            skipped += 1;
            continue;
        };
        let units = result.utilization[c.id as usize];
        let expected: f64 = fixed6(units, result.multiplier as u64)
            .parse()
            .expect("fixed6 output parses as f64");
        features.push(json!({
            "type": "Feature",
            "geometry": {
                "type": "LineString",
                "coordinates": [[dep.1, dep.0], [arr.1, arr.0]],
            },
            "properties": {
                "connection_id": c.id,
                "expected_passengers": expected,
                "trip": c.trip,
            },
        }));
    }
    let doc = json!({ "type": "FeatureCollection", "features": features });
    let mut text = serde_json::to_string_pretty(&doc).expect("geojson serialize");
    text.push('\n');
    (text, skipped)
}

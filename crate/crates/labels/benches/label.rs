use criterion::{criterion_group, criterion_main, Criterion};
use cup_labels::{label_frames, LabelOptions};
use pneuma_sim::{render_seal_frame, Execution, RenderOptions};

fn label(c: &mut Criterion) {
    let o = RenderOptions::default();
    let frames: Vec<_> = (0..64)
        .map(|i| {
            let v = 1.0 - i as f64 / 80.0;
            let mut f = render_seal_frame(&[v, 1.0, v, 1.0], o.midpoint(), 0.0, &o, i).unwrap();
            f.index = i as usize;
            f.t = i as f64 * 0.006;
            f
        })
        .collect();
    let orient = [(0.0, 0.0), (0.5, 0.0)];
    let opts = LabelOptions::default();
    let mut g = c.benchmark_group("label_64_frames");
    g.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        g.bench_function(name, |b| b.iter(|| label_frames(&frames, &orient, &opts, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, label);
criterion_main!(benches);

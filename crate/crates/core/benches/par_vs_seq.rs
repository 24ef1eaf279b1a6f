use criterion::{criterion_group, criterion_main, Criterion};
use dendro::dsets::{check_inner_kan, Universe};
use dendro::nerve::dendroidal_nerve;
use dendro::operads::make_asa;
use dendro::operads::tensor::{bv_tensor_oracle, compare_with_oracle};
use dendro::par::{set_mode, Mode};

fn modes(c: &mut Criterion) {
    let u = Universe::new(3, 5);
    let nerve = dendroidal_nerve(&make_asa(&["p", "q"], 4), &u).unwrap();
    let oracle = bv_tensor_oracle(3, 4, 4).unwrap();
    let mut g = c.benchmark_group("par_vs_seq");
    g.sample_size(10);
    for (name, mode) in [("seq", Mode::Sequential), ("par", Mode::Parallel)] {
        set_mode(mode);
        g.bench_function(format!("inner_kan/{}", name), |b| b.iter(|| check_inner_kan(&nerve, 3, true)));
        g.bench_function(format!("nerve/{}", name), |b| b.iter(|| dendroidal_nerve(&make_asa(&["p", "q"], 4), &u).unwrap()));
        g.bench_function(format!("tensor_oracle/{}", name), |b| b.iter(|| compare_with_oracle(&oracle)));
    }
    set_mode(Mode::Parallel);
    g.finish();
}

criterion_group!(benches, modes);
criterion_main!(benches);

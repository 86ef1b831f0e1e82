use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use kpmod_core::{fixtures, universal_cover_ball, CoreId, Field, KPElement, Monomial};

fn kp_mul(c: &mut Criterion) {
    let g = Arc::new(fixtures::two_by_two());
    let q = Field::Rational;
    let mut elems = Vec::new();
    for v in g.vertices() {
        let mut short = vec![g.identity(v)];
        short.extend(g.edge_ids().filter(|&e| g.edge(e).src == v).map(|e| g.edge_path(e)));
        let mut a = KPElement::zero(g.clone(), q);
        for l in &short {
            for m in &short {
                a.add_term(Monomial::new(l.clone(), m.clone()).unwrap(), q.one());
            }
        }
        elems.push(a);
    }
    c.bench_function("kp_mul", |b| {
        b.iter(|| {
            for x in &elems {
                for y in &elems {
                    black_box(x.mul(y).unwrap());
                }
            }
        })
    });
}

fn sim_relation(c: &mut Criterion) {
    let reps = fixtures::all_reps();
    c.bench_function("sim_relation", |b| {
        b.iter(|| {
            for (_, d) in &reps {
                black_box(d.sim_relation());
            }
        })
    });
}

fn cover_ball(c: &mut Criterion) {
    let d = fixtures::torus_identity();
    c.bench_function("cover_ball_torus_r6", |b| b.iter(|| black_box(universal_cover_ball(&d, CoreId(0), 6).unwrap())));
}

criterion_group!(benches, kp_mul, sim_relation, cover_ball);
criterion_main!(benches);

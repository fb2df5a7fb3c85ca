use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;
use ty3_core::pbw::RttSpec;
use ty3_core::twisted::evaluate;
use ty3_core::verify::relations::{instances, RelFamily};
use ty3_core::{Algebra, Element, GeneratorId, Rational, Tables};

fn table_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("tables");
    g.sample_size(10);
    for n in [2, 4] {
        g.bench_function(format!("build/N={n}"), |b| {
            b.iter(|| Tables::build(black_box(n)).unwrap())
        });
    }
    g.finish();
}

/// A product of two level-3 sums, straightened from scratch or with warm
/// bracket caches.
fn straightening(c: &mut Criterion) {
    let operands = |alg: &Algebra| {
        let sum = |pairs: &[(i8, i8)], r: u32| {
            let mut e = Element::zero();
            for &(i, j) in pairs {
                e.add_assign(&alg.gen_element(GeneratorId::T { i, j, r }));
            }
            e.scale(&Rational::new(1, 2))
        };
        (
            sum(&[(1, -1), (0, 1), (-1, 0)], 3),
            sum(&[(-1, 1), (1, 0), (0, 0)], 3),
        )
    };
    c.bench_function("straighten/cold", |b| {
        b.iter_batched(
            || Algebra::new(RttSpec::new(3)),
            |alg| {
                let (x, y) = operands(&alg);
                alg.multiply(&alg.multiply(&x, &y), &x)
            },
            BatchSize::SmallInput,
        )
    });
    let alg = Algebra::new(RttSpec::new(3));
    let (x, y) = operands(&alg);
    c.bench_function("straighten/warm", |b| {
        b.iter(|| alg.multiply(&alg.multiply(black_box(&x), &y), &x))
    });
}

fn relation_evaluation(c: &mut Criterion) {
    let tables = Tables::build(4).unwrap();
    let rels = instances(RelFamily::EE, 4);
    c.bench_function("relations/EE/N=4", |b| {
        b.iter(|| {
            rels.iter()
                .map(|inst| {
                    let l = evaluate(&inst.relation.lhs, &tables).unwrap();
                    let r = evaluate(&inst.relation.rhs, &tables).unwrap();
                    l == r
                })
                .filter(|ok| *ok)
                .count()
        })
    });
}

criterion_group!(benches, table_build, straightening, relation_evaluation);
criterion_main!(benches);

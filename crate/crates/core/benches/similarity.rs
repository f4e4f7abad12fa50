use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dlsim::gen::{GenConfig, Generator};
use dlsim::{parse_concept, parse_kb, Backend, Engine, Exec, Item, KnowledgeBase};

const MODES: [Exec; 2] = [Exec::Sequential, Exec::Parallel];

fn family() -> KnowledgeBase {
    parse_kb(include_str!("../fixtures/family.dlkb")).unwrap()
}

fn generated() -> KnowledgeBase {
    let cfg = GenConfig {
        individuals: 40,
        concept_names: 10,
        defined: 4,
        role_names: 3,
        concept_assertions: 60,
        role_assertions: 50,
        max_depth: 2,
        max_at_least: 1,
        ..GenConfig::default()
    };
    Generator::new(11, cfg).kb()
}

fn individuals(kb: &KnowledgeBase) -> Vec<Item> {
    kb.individuals().iter().map(|a| Item::Individual(a.clone())).collect()
}

fn matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("matrix");
    group.sample_size(20);
    let runs: [(&str, KnowledgeBase, &[Backend]); 2] = [
        ("family", family(), &[Backend::Canonical, Backend::Entail]),
        ("generated", generated(), &[Backend::Canonical]),
    ];
    for (name, kb, backends) in runs {
        let items = individuals(&kb);
        let depth = Some(2);
        for &backend in backends {
            for exec in MODES {
                let id = BenchmarkId::new(format!("{name}/{backend}"), format!("{exec:?}"));
                group.bench_function(id, |b| {
                    b.iter(|| Engine::new(&kb).unwrap().with_exec(exec).sim_matrix(&items, depth, backend).unwrap())
                });
            }
        }
    }
    group.finish();
}

fn retrieval(c: &mut Criterion) {
    let mut group = c.benchmark_group("entail_retrieval");
    let kb = family();
    let q = parse_concept("Sibling or Grandparent").unwrap();
    for exec in MODES {
        group.bench_function(BenchmarkId::new("family", format!("{exec:?}")), |b| {
            let e = Engine::new(&kb).unwrap().with_exec(exec);
            b.iter(|| e.extension(&q, Backend::Entail).unwrap())
        });
    }
    group.finish();
}

fn msc(c: &mut Criterion) {
    let mut group = c.benchmark_group("msc");
    let kb = family();
    for exec in MODES {
        group.bench_function(BenchmarkId::new("family_default_depth", format!("{exec:?}")), |b| {
            b.iter(|| Engine::new(&kb).unwrap().with_exec(exec).msc("Claudia", None, Backend::Entail).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, matrix, retrieval, msc);
criterion_main!(benches);

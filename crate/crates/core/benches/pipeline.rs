use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use yona_core::dataset::{augment_records, synthetic_cifar, CifarVariant};
use yona_core::{AugmentationSpec, Composition, Execution, ImageTensor, Pipeline, SeedSpec, YonaConfig};

fn dataset_fanout(c: &mut Criterion) {
    let records = synthetic_cifar(2_000, CifarVariant::C10, 1);
    let pipeline = Pipeline::new(AugmentationSpec::randaug(), Composition::Yona(YonaConfig::default()));
    let mut group = c.benchmark_group("augment_dataset");
    group.throughput(Throughput::Elements(records.len() as u64));
    group.sample_size(20);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| augment_records(black_box(&records), &pipeline, 7, exec).unwrap())
        });
    }
    group.finish();
}

fn per_image(c: &mut Criterion) {
    let image = ImageTensor::random(3, 32, 32, &mut yona_core::derive_stream(SeedSpec::new(3, 0))).unwrap();
    let mut group = c.benchmark_group("per_image");
    for aug in ["hflip", "cutout", "randaug"] {
        let spec = AugmentationSpec::by_name(aug).unwrap();
        for (label, comp) in [("plain", Composition::Plain), ("yona", Composition::Yona(YonaConfig::default()))] {
            let pipeline = Pipeline::new(spec.clone(), comp);
            let mut i = 0u64;
            group.bench_function(BenchmarkId::new(label, aug), |b| {
                b.iter(|| {
                    i += 1;
                    pipeline.apply(black_box(&image), 1, i).unwrap()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, dataset_fanout, per_image);
criterion_main!(benches);

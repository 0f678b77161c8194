// SPDX-License-Identifier: Apache-2.0

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use bsg_core::conjugacy::{is_conjugate_solvable, separate_conjugacy};
use bsg_core::numtheory::{find_unsolvable_modulus, multiplicative_order};
use bsg_core::quotients::perm_quotient_search;
use bsg_core::{britton_reduce, GroupParams, Word};

fn word(s: &str) -> Word {
    s.parse().expect("bench word")
}

fn reduction(c: &mut Criterion) {
    let g = GroupParams::new(2, 3).unwrap();
    // Nested pinches: a^-k b^(2^k) a^k collapses to b^(3^k).
    let nested: Word = (0..12).fold(word("b^4096"), |w, _| word("a^-1").multiply(&w).multiply(&word("a")));
    c.bench_function("britton_reduce nested G(2,3)", |b| b.iter(|| britton_reduce(g, black_box(&nested)).unwrap()));
    let comm = word("[a b a^-1, b]").pow(20);
    c.bench_function("britton_reduce commutator power G(2,3)", |b| {
        b.iter(|| britton_reduce(g, black_box(&comm)).unwrap())
    });
}

fn number_theory(c: &mut Criterion) {
    c.bench_function("multiplicative_order 2 mod 10^12+39", |b| {
        b.iter(|| multiplicative_order(black_box(2), black_box(1_000_000_000_039u64)).unwrap())
    });
    c.bench_function("find_unsolvable_modulus 3 7 -5", |b| {
        b.iter(|| find_unsolvable_modulus(black_box(3), black_box(7), black_box(-5)).unwrap())
    });
}

fn conjugacy(c: &mut Criterion) {
    let (x, y) = (word("a^2 b^5 a b^-3 a^-1"), word("b^7 a^2"));
    c.bench_function("is_conjugate_solvable n=3", |b| {
        b.iter(|| is_conjugate_solvable(3, black_box(&x), black_box(&y)).unwrap())
    });
    c.bench_function("separate_conjugacy b vs b^7, n=2", |b| {
        b.iter(|| separate_conjugacy(2, black_box(&word("b")), black_box(&word("b^7"))).unwrap())
    });
}

fn permutations(c: &mut Criterion) {
    let g = GroupParams::new(2, 2).unwrap();
    let target = word("a^-1 b a b^-1");
    c.bench_function("perm_quotient_search G(2,2)", |b| {
        b.iter(|| perm_quotient_search(g, black_box(&target), 8).unwrap())
    });
}

criterion_group!(benches, reduction, number_theory, conjugacy, permutations);
criterion_main!(benches);

use std::time::Instant;

fn main() {
    for &target in &[100_000usize, 1_000_000] {
        let f = fastzz::gen_clique_by_ops(30, target, 2, 42).unwrap();
        for run in 0..4 {
            let t0 = Instant::now();
            let (matrix, reg) = fastzz::convert_filt(&f).unwrap();
            let t = t0.elapsed();
            let t1 = Instant::now();
            drop(matrix);
            drop(reg);
            let td = t1.elapsed();
            println!("m={} run {run}: convert={t:.2?} drop={td:.2?}", f.len());
        }
    }
}

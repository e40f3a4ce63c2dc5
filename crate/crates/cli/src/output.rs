use std::path::Path;

use serde::Serialize;
use threatlens_core::learners::MetricsReport;
use threatlens_core::pipeline::SplitSizes;

#[derive(Serialize)]
pub struct MetricsDoc<'a> {
    pub task: &'a str,
    pub seed: u64,
    pub train_fraction: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub metrics: &'a MetricsReport,
    pub bundle: &'a Path,
}

impl MetricsDoc<'_> {
    pub fn new<'a>(
        task: &'a str,
        seed: u64,
        train_fraction: f64,
        sizes: SplitSizes,
        metrics: &'a MetricsReport,
        bundle: &'a Path,
    ) -> MetricsDoc<'a> {
        MetricsDoc {
            task,
            seed,
            train_fraction,
            train_size: sizes.train,
            test_size: sizes.test,
            metrics,
            bundle,
        }
    }

    pub fn table(&self) -> String {
        let m = self.metrics;
        let mut out = String::new();
        let mut row = |k: &str, v: String| out.push_str(&format!("{k:<10} {v}\n"));
        row("task", self.task.to_string());
        row("seed", self.seed.to_string());
        row(
            "split",
            format!("{} train / {} test", self.train_size, self.test_size),
        );
        row("bundle", self.bundle.display().to_string());
        row("accuracy", format!("{:.4}", m.accuracy));
        row("precision", format!("{:.4}", m.precision));
        row("recall", format!("{:.4}", m.recall));
        row("f1", format!("{:.4}", m.f1));
        row("roc_auc", format!("{:.4}", m.roc_auc));
        row(
            "confusion",
            format!("tp={} fp={} tn={} fn={}", m.tp, m.fp, m.tn, m.fn_),
        );
        out
    }

    pub fn print(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string(self).expect("metrics serialize"));
        } else {
            print!("{}", self.table());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_uses_four_decimals() {
        let m = MetricsReport::from_counts(97, 0, 870, 6, 0.99);
        let doc = MetricsDoc::new(
            "spam",
            42,
            0.8,
            SplitSizes { train: 3, test: 2 },
            &m,
            Path::new("b.json"),
        );
        let t = doc.table();
        assert!(t.contains("seed       42\n"), "{t}");
        assert!(t.contains("precision  1.0000\n"), "{t}");
        assert!(t.contains("accuracy   0.9938\n"), "{t}");
    }
}

// The three published benchmark tables next to the computed prices.

use asian_ld::tables::Table;

fn main() -> asian_ld::Result<()> {
    for table in [Table::Fmw7, Table::SmallVol, Table::Discrete] {
        println!("{}", table.name());
        for case in table.cases() {
            let res = case.price()?;
            println!(
                "  {:14} {:3}  computed {:<13.7e} published {:<11e} other {}",
                case.label,
                res.regime.to_string(),
                res.price,
                case.reference,
                case.comparison.map_or("-".into(), |c| format!("{c:e}"))
            );
        }
    }
    Ok(())
}

// The pipeline behind the command line, driven from code.

use resurgence::pipeline::{run_pipeline, AnalysisReport, Command, LambdaSpec, OperatorSource, PipelineOptions};

pub fn run_example() -> resurgence::Result<()> {
    let opts = PipelineOptions { order: 30, ..Default::default() };
    let euler = run_pipeline(&Command::Analyze(OperatorSource::Text("x*theta^2 + theta - 1".into())), &opts);
    print!("{}", euler.summary());

    let grid = Command::Partition { k: 2, lambdas: LambdaSpec::parse_grid("0.02:0.1:3")?, j: 1 };
    let table = run_pipeline(&grid, &PipelineOptions::default());
    print!("{}", table.summary());

    let text = table.to_json();
    let back = AnalysisReport::from_json(&text)?;
    println!("round trip identical: {}", back.to_json() == text);
    Ok(())
}

#[allow(dead_code)]
fn main() -> resurgence::Result<()> {
    run_example()
}

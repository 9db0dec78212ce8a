//! Searches small topologies for a packet-delivery counterexample.

use awn_aodv::{packet_delivery, SearchBounds};

fn main() -> Result<(), awn_aodv::Error> {
    let out = packet_delivery(SearchBounds::default())?;
    println!("complete {} truncated {}", out.complete, out.truncated);
    match out.violation {
        Some((src, w)) => {
            println!("{src}\n{}", w.message);
            for (i, l) in w.trace.iter().enumerate() {
                println!("{:>4}  {l}", i + 1);
            }
        }
        None => println!("no violation within {:?}", out.bounds),
    }
    Ok(())
}

"""Graph model, oracles, polynomial algebra and weight constructions."""

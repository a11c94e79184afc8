"""Index the bundled documentation and search it through lexical and dense channels."""
from _paths import DATA

from cobbie.retrieval import HashingEmbedder, LexicalOverlapReranker, Retriever, index_corpus

embedder = HashingEmbedder()
index = index_corpus(DATA / "docs" / "corpus.txt", embedder)
print(f"{len(index.chunks)} chunks indexed\n")

retriever = Retriever(index, embedder, reranker=LexicalOverlapReranker())
for query in ("how do I read property sets", "wall volume"):
    print(f"## {query}")
    print(retriever.retrieve(query))
    print()

"""HTTP summarization service.

One POST endpoint speaking the wire format ``{"input": str}`` ->
``{"summary": str}``. Echo mode returns the input verbatim, which pins
the wire contract without any model; model mode greedily decodes from a
checkpoint with bounded output length. Malformed requests get a 400
with a JSON error body; the request is parsed by hand so the error
shape stays under this module's control.
"""

from __future__ import annotations

import json
import logging

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

logger = logging.getLogger(__name__)

MODES = ("echo", "model")


def _bad_request(message: str) -> JSONResponse:
    return JSONResponse(status_code=400, content={"error": message})


class _ModelRunner:
    """Loads a checkpoint once and turns input text into a summary."""

    def __init__(self, checkpoint: str, max_new_tokens: int, min_new_tokens: int):
        import torch
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(checkpoint)
        self.model.eval()
        self.max_new_tokens = max_new_tokens
        self.min_new_tokens = min(min_new_tokens, max_new_tokens)
        # Keep padding and unknown tokens out of the decoded text so the
        # output is real characters between start and end of sequence.
        self.suppress = [
            token_id
            for token_id in (self.tokenizer.pad_token_id, self.tokenizer.unk_token_id)
            if token_id is not None
        ]

    def summarize(self, text: str) -> str:
        encoded = self.tokenizer(
            text,
            return_tensors="pt",
            truncation=True,
            max_length=self.model.config.max_position_embeddings,
        )
        with self._torch.no_grad():
            generated = self.model.generate(
                **encoded,
                max_new_tokens=self.max_new_tokens,
                min_new_tokens=self.min_new_tokens,
                do_sample=False,
                num_beams=1,
                suppress_tokens=self.suppress or None,
            )
        return self.tokenizer.decode(generated[0], skip_special_tokens=True)


def make_app(
    checkpoint: str | None = None,
    mode: str = "echo",
    max_new_tokens: int = 48,
    min_new_tokens: int = 4,
) -> FastAPI:
    """Build the service. Model mode loads the checkpoint eagerly."""
    if mode not in MODES:
        raise ValueError(f"unknown serve mode {mode!r}; expected one of {MODES}")
    if max_new_tokens < 1:
        raise ValueError(f"max_new_tokens must be >= 1, got {max_new_tokens}")
    runner = None
    if mode == "model":
        if not checkpoint:
            raise ValueError("model mode needs a checkpoint directory")
        runner = _ModelRunner(checkpoint, max_new_tokens, min_new_tokens)

    app = FastAPI(title="summarization service")

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok", "mode": mode}

    @app.post("/summarize")
    async def summarize(request: Request):
        raw = await request.body()
        try:
            body = json.loads(raw)
        except ValueError:
            return _bad_request("request body is not valid JSON")
        if not isinstance(body, dict):
            return _bad_request("request body must be a JSON object")
        text = body.get("input")
        if not isinstance(text, str):
            return _bad_request("field 'input' must be a string")
        if mode == "echo":
            return {"summary": text}
        return {"summary": runner.summarize(text)}

    return app

import { ApiClient } from "./api.js";
import { mountClassics, mountWriter } from "./dom.js";

const api = new ApiClient();
mountWriter(api);
mountClassics(api);

void api
  .model()
  .then((info) => {
    const footer = document.getElementById("model-info");
    if (footer) {
      footer.textContent =
        `vocabulary ${info.vocabSize} · context ${info.contextLength} words · ` +
        `hidden ${info.hiddenSize} · embedding ${info.embeddingDim}`;
    }
  })
  .catch(() => {
    const footer = document.getElementById("model-info");
    if (footer) footer.textContent = "server unreachable";
  });

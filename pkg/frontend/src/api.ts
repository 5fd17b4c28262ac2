import { FormSchema, SuggestResponse } from "./types.js";

export interface SuggestApi {
  fetchSchema(): Promise<FormSchema>;
  suggest(
    filled: Record<string, string>,
    target: string,
    signal?: AbortSignal
  ): Promise<SuggestResponse>;
}

/** HTTP client for the /schema and /suggest endpoints. */
export class ApiClient implements SuggestApi {
  constructor(private readonly baseUrl: string) {}

  async fetchSchema(): Promise<FormSchema> {
    const response = await fetch(`${this.baseUrl}/schema`);
    if (!response.ok) {
      throw new Error(`schema request failed: ${response.status}`);
    }
    return (await response.json()) as FormSchema;
  }

  async suggest(
    filled: Record<string, string>,
    target: string,
    signal?: AbortSignal
  ): Promise<SuggestResponse> {
    const response = await fetch(`${this.baseUrl}/suggest`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ filled, target }),
      signal,
    });
    if (!response.ok) {
      throw new Error(`suggest request failed: ${response.status}`);
    }
    return (await response.json()) as SuggestResponse;
  }
}

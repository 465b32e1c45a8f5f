/*
 * Copyright 2026 The bgskip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Plain C client of the shared library: the header must compile as C and the
 * exported symbols must resolve without any C++ runtime on the caller side. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "bgskip/bgskip.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

int main(void) {
  bgskip_session* s = NULL;
  char* err = NULL;
  bgskip_cost_report rep;
  char* plan = NULL;

  EXPECT(strcmp(bgskip_version(), "0.1.0") == 0);

  EXPECT(bgskip_session_create("{\"pcmad\":{\"p\":-1}}", NULL, &s, &err) == BGSKIP_ERROR_CONFIG);
  EXPECT(s == NULL);
  EXPECT(err != NULL && strstr(err, "p") != NULL);
  bgskip_free(err);

  EXPECT(bgskip_session_create(NULL, NULL, &s, NULL) == BGSKIP_OK);
  EXPECT(s != NULL);

  EXPECT(bgskip_reduction_factor(s, "C&S", "Pedestron(HRNet)", 2048.0 * 1024, 0.091 * 2048 * 1024, &rep) == BGSKIP_OK);
  EXPECT(fabs(rep.bltnet_gflops - 81.8088) < 1e-3);
  EXPECT(fabs(rep.reduction_factor - 7.295) < 1e-3);

  EXPECT(bgskip_reduction_factor(s, "C&S", "NoSuchNet", 1.0, 0.0, &rep) == BGSKIP_ERROR_CONFIG);
  EXPECT(strstr(bgskip_last_error(s), "NoSuchNet") != NULL);

  EXPECT(bgskip_plan_record(s,
                            "{\"image_id\":\"x\",\"width\":2048,\"height\":1024,"
                            "\"proposals\":[{\"id\":1,\"box\":[700,100,1300,620],\"score\":0.9}]}",
                            &plan) == BGSKIP_OK);
  EXPECT(plan != NULL && strstr(plan, "\"m_pixels\":112320") != NULL);
  bgskip_free(plan);

  EXPECT(bgskip_plan_record(s, "{\"image_id\":\"x\"", &plan) == BGSKIP_ERROR_DATA);

  bgskip_session_destroy(s);
  bgskip_session_destroy(NULL);

  if (failures) {
    fprintf(stderr, "%d expectation(s) failed\n", failures);
    return 1;
  }
  printf("C client OK\n");
  return 0;
}
